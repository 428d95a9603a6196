//! CSV tables, SVG plots and the figure recipes built on them.

mod demos;
mod figures;
mod svg;
mod table;

pub use demos::{
    cantor_cdf, cantor_function, joint_scatter, sample_bernoulli_convolution, sup_distance,
    ScatterPoint,
};
pub use figures::*;
pub use svg::{bar_chart, line_plot, scatter_plot, Series};
pub use table::{format_float, Cell, Table};
