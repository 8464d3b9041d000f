#pragma once

// Coupled-mode scattering kernel.
//
// Input-output convention: out = sqrt(κ) * mode - in. Each mode obeys
//   (κ/2 - i 2πδ) x + i [x, H] = sqrt(κ) x_in
// in the frame where conjugated channels carry x^†. Stacking the three rows
// gives M(δ) x = K x_in, so S(δ) = K M(δ)^{-1} K - I with K = diag(sqrt κ).
// All rates enter M in angular units (2π × the stored Hz values).

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nonrecip/model.hpp"

namespace nonrecip {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;

struct ScatteringMatrix {
    double delta = 0.0;  // Hz, probe detuning from the un-conjugated carriers
    Matrix3c entries = Matrix3c::Identity();
    ChannelFrame frame{};

    /// S_{out,in}
    Complex operator()(std::size_t out, std::size_t in) const { return entries(out, in); }
    double power(std::size_t out, std::size_t in) const { return std::norm(entries(out, in)); }
};

struct SweepResult {
    std::vector<double> deltas;
    std::vector<ScatteringMatrix> matrices;
    ValidatedDevice device;

    std::size_t size() const noexcept { return deltas.size(); }
    /// Index of the grid point closest to δ = 0.
    std::size_t center_index() const;
};

/// Zero-detuning photon gain G = ((1+rho)/(1-rho))^2. DomainError if rho >= 1.
double gain_coefficient(double rho);
/// Zero-detuning conversion coefficient C = 4 rho / (1+rho)^2.
double conversion_coefficient(double rho);
/// Inverse of gain_coefficient: rho = (sqrt G - 1)/(sqrt G + 1), G >= 1.
double rho_for_gain(double gain);
/// Inverse of conversion_coefficient on the under-coupled branch (rho <= 1).
double rho_for_conversion(double conversion);

Matrix3c build_dynamics_matrix(const ValidatedDevice& device, double delta_hz);

/// Throws SingularMatrixError at a parametric oscillation point.
ScatteringMatrix scattering_at(const ValidatedDevice& device, double delta_hz);

/// OpenMP sweep over a strictly increasing grid. Thread count is capped by
/// NONRECIP_THREADS. Bit-identical to sweep_serial.
SweepResult sweep(const ValidatedDevice& device, std::span<const double> delta_grid);
SweepResult sweep_serial(const ValidatedDevice& device, std::span<const double> delta_grid);

/// On-resonance S_bb of the two-gain/one-conversion loop at |φ_tot| = π/2.
double sbb_closed_form(double rho_ab, double rho_bc, double rho_ac);

/// Minimum conversion coefficient for input match: C_min = 1 - 1/G_bc.
double directionality_threshold(double gain_bc);

/// True when every eigenvalue of M(0) has positive real part, i.e. the
/// linearised dynamics decay and the device is below oscillation threshold.
bool is_stable(const ValidatedDevice& device);

/// n points evenly spaced over [lo, hi]; n == 1 gives {(lo+hi)/2}.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

}  // namespace nonrecip
