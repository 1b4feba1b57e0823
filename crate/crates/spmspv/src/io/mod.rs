//! File formats: Matrix Market matrices, a plain-text vector format and the
//! benchmark CSV schema.

mod csv;
mod mtx;
mod vectext;

pub use csv::{append_csv_row, format_csv_row, parse_csv, read_csv};
pub use mtx::{read_mtx, read_mtx_from, write_mtx, MtxField, MtxHeader, MtxSymmetry};
pub use vectext::{read_vec, read_vec_from, write_vec, write_vec_to};
