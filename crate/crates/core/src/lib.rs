pub mod arith;
pub mod cache;
pub mod conjugacy;
pub mod cubicforms;
pub mod error;
pub mod family;
pub mod lowlying;
pub mod formspaces;
pub mod fp;
pub mod gf;
pub mod massformula;
pub mod monicfamily;
pub mod padic;
pub mod polyfactor;
pub mod quaternion;
