// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! CODATA 2018 exact / recommended constants (SI).

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Femtofarad in farads.
pub const FEMTOFARAD: f64 = 1e-15;
