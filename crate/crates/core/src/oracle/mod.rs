//! Independent verification oracles: brute-force scans, exhaustive
//! enumeration and numerical quadrature. Nothing here shares code with the
//! implementations under test.

mod bruteforce;
mod quadrature;

pub use bruteforce::{
    asd_bruteforce, dice_bruteforce, gdice_bruteforce, hausdorff_bruteforce,
    min_energy_bruteforce, signed_dtm_bruteforce,
};
pub use quadrature::{
    adaptive_simpson, cfd_quadrature_1d, cfd_quadrature_2d, gaussian_product_integral_1d,
    gaussian_product_integral_2d, mixture_l2_quadrature_1d,
};
