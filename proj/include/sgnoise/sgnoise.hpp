#pragma once

// Stern-Gerlach interferometer decoherence toolkit: colored-noise synthesis,
// classical arm dynamics, linear-response transfer functions, master-equation
// and spin-witness layers, and the Monte Carlo harness tying them together.

#include "sgnoise/core.hpp"
#include "sgnoise/rng.hpp"
#include "sgnoise/quadrature.hpp"
#include "sgnoise/psd.hpp"
#include "sgnoise/noise_synthesis.hpp"
#include "sgnoise/params.hpp"
#include "sgnoise/trajectory.hpp"
#include "sgnoise/phase.hpp"
#include "sgnoise/fft.hpp"
#include "sgnoise/transfer.hpp"
#include "sgnoise/variance.hpp"
#include "sgnoise/quantum_state.hpp"
#include "sgnoise/density_matrix.hpp"
#include "sgnoise/spin.hpp"
#include "sgnoise/ermakov.hpp"
#include "sgnoise/quadratic_noise.hpp"
#include "sgnoise/scenario.hpp"
#include "sgnoise/report.hpp"
