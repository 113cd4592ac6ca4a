//! The order-½ factor of Σ(cos√n + 2)zⁿ/n!, the subharmonic example, and the
//! combinatorial density lemma.

mod borel;
mod combi;
mod subharmonic;

pub use borel::{default_rho, g_factor_contour, g_factor_contour_at, phi_borel};
pub use combi::{c1_for, c2_for, combi_find, r_min, recheck_witness, DensityWitness, MAX_LISTED};
pub use subharmonic::{
    claims_check, f_gauss, laplacian_off_support, max_theta_excess, proposition_report, riesz_density,
    riesz_density_fd, riesz_mass, riesz_mass_fd, u_eval, ClaimsReport, PropositionReport, SubharmonicExample,
};
