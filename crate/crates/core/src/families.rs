//! Parametric families (in progress).
