pub mod green;
pub mod io;
pub mod numerics;
pub mod schrodinger;
pub mod substitution;
pub mod surface;
pub mod verify;
