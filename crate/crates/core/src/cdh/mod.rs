//! Resolution squares and the fiber of `HH(A) -> HH(Ã)`.

mod fiber;
mod omega;
mod pic;
pub mod square;

pub use fiber::{fiber_engine, FiberCell, FiberEngine, FormulaAggregate, FormulaCell, FormulaReport};
pub use omega::{cdh_omega, CdhOmega};
pub use pic::{nk0_crosscheck, pic_conductor, seminormalization, Nk0Row, PicReport, SeminormalReport};
pub use square::{ResolutionSquare, SquareKind};
