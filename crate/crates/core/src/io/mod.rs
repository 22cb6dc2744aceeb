//! Configuration parsing, coefficient and field file formats, CSV tables,
//! SVG line plots, and the command runners behind the `patchsep` binary.

mod commands;
mod config;
mod formats;
mod svg;
mod table;

pub use commands::{run_command, Check, Command, CommandError, Outcome, INJECTIVITY_THRESHOLD};
pub use config::{parse_config, required_keys, RunConfig, Value};
pub use formats::{
    field_csv_len, read_field_csv, read_sh_coeffs, read_vector_coeffs, write_field_csv, write_sh_coeffs,
    write_vector_coeffs,
};
pub use svg::{emit_svg_lineplot, PlotSpec};
pub use table::{format_float, Cell, Table};
