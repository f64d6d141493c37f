//! Fixtures shared by the benchmarks.

use splicekit::{connected_sum_default, pretzel_columns, CurveMap};

/// The 7-crossing projection with columns (3, 1, 3).
pub fn seven_four() -> CurveMap {
    pretzel_columns(&[3, 1, 3]).expect("valid columns")
}

pub fn seven_four_twice() -> CurveMap {
    let p = seven_four();
    connected_sum_default(&p, &p).expect("knot projections")
}
