//! Zero counting by the argument principle, zero location and counting profiles.

mod locate;
mod profile;
mod winding;

pub use locate::{locate_zeros, locate_zeros_with, LocateOptions, Zero, ZeroSet};
pub use profile::{
    count_row, counting_profile, counting_profile_with, fit_growth, CountSample, CountingFunction, GrowthFit,
    COUNT_HEADER,
};
pub use winding::{contour_precision, winding_count, winding_count_with, Winding, WindingOptions};
