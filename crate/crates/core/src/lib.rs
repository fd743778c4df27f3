//! Differential triads over finite topological spaces.
//!
//! A differential triad `(A, ∂, Ω)` pairs a sheaf of commutative algebras
//! with a module sheaf and a Leibniz morphism between them. This crate makes
//! the objects and morphisms of that category concrete over finite spaces
//! and finite-dimensional algebras over ℚ, where every axiom becomes an exact
//! linear-algebra check.

pub mod algebra;
pub mod dtcat;
pub mod exactla;
pub mod finspace;
pub mod kaehler;
pub mod sheaf;
pub mod triad;
