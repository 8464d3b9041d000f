#include "nonrecip/cmt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>

#include "nonrecip/error.hpp"
#include "nonrecip/parallel.hpp"

namespace nonrecip {

namespace {

constexpr Complex kI{0.0, 1.0};

std::string fmt(const char* pattern, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

void check_grid(std::span<const double> grid) {
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) {
            throw Error(ErrorKind::DomainError, "detuning grid must be strictly increasing");
        }
    }
}

}  // namespace

double gain_coefficient(double rho) {
    if (!(rho >= 0.0) || rho >= 1.0) {
        throw Error(ErrorKind::DomainError, fmt("gain_coefficient needs 0 <= rho < 1, got %.9g", rho));
    }
    double root = (1.0 + rho) / (1.0 - rho);
    return root * root;
}

double conversion_coefficient(double rho) {
    if (!(rho >= 0.0)) throw Error(ErrorKind::DomainError, fmt("conversion_coefficient needs rho >= 0, got %.9g", rho));
    return 4.0 * rho / ((1.0 + rho) * (1.0 + rho));
}

double rho_for_gain(double gain) {
    if (!(gain >= 1.0) || !std::isfinite(gain)) {
        throw Error(ErrorKind::DomainError, fmt("rho_for_gain needs G >= 1, got %.9g", gain));
    }
    double root = std::sqrt(gain);
    return (gain - 1.0) / ((root + 1.0) * (root + 1.0));
}

double rho_for_conversion(double conversion) {
    if (!(conversion >= 0.0) || conversion > 1.0) {
        throw Error(ErrorKind::DomainError, fmt("rho_for_conversion needs 0 <= C <= 1, got %.9g", conversion));
    }
    double d = 1.0 + std::sqrt(1.0 - conversion);
    return conversion / (d * d);
}

Matrix3c build_dynamics_matrix(const ValidatedDevice& device, double delta_hz) {
    const auto& modes = device.modes();
    const auto& frame = device.frame();
    const double detuning = kTwoPi * delta_hz;

    Matrix3c m = Matrix3c::Zero();
    for (std::size_t k = 0; k < 3; ++k) {
        m(k, k) = Complex(kTwoPi * modes[k].kappa / 2.0, -detuning);
    }

    // Adds the row-m contribution of a commutator [x_m, H] = c * (channel n
    // variable, un-conjugated view). Conjugated rows take the adjoint.
    auto add = [&](std::size_t row, std::size_t col, Complex c) {
        m(row, col) += frame[row].conjugated ? -kI * std::conj(c) : kI * c;
    };

    for (const auto& cp : device.couplings()) {
        std::size_t i = device.index_of(cp.pair.first());
        std::size_t j = device.index_of(cp.pair.second());
        const double g = kTwoPi * std::sqrt(cp.rho * modes[i].kappa * modes[j].kappa) / 2.0;
        const Complex ph = std::polar(1.0, cp.phase);
        if (cp.kind == ProcessKind::Conversion) {
            // H = g (e^{iφ} x_p x_q^† + h.c.)
            std::size_t p = i, q = j;
            if (i == 1 && j == 2) std::swap(p, q);
            add(p, q, g * std::conj(ph));
            add(q, p, g * ph);
        } else {
            // H = g (e^{-iφ} x_i^† x_j^† + h.c.)
            add(i, j, g * std::conj(ph));
            add(j, i, g * std::conj(ph));
        }
    }
    return m;
}

ScatteringMatrix scattering_at(const ValidatedDevice& device, double delta_hz) {
    const Matrix3c m = build_dynamics_matrix(device, delta_hz);
    Eigen::PartialPivLU<Matrix3c> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 64.0 * std::numeric_limits<double>::epsilon())) {
        throw SingularMatrixError(delta_hz);
    }
    Eigen::Vector3d root_kappa;
    for (std::size_t k = 0; k < 3; ++k) root_kappa[k] = std::sqrt(kTwoPi * device.modes()[k].kappa);
    const Matrix3c k = root_kappa.cast<Complex>().asDiagonal();

    ScatteringMatrix s;
    s.delta = delta_hz;
    s.entries = k * lu.solve(k) - Matrix3c::Identity();
    s.frame = device.frame();
    return s;
}

std::size_t SweepResult::center_index() const {
    if (deltas.empty()) throw Error(ErrorKind::EmptyBand, "sweep has no points");
    auto it = std::min_element(deltas.begin(), deltas.end(),
                               [](double a, double b) { return std::abs(a) < std::abs(b); });
    return static_cast<std::size_t>(it - deltas.begin());
}

SweepResult sweep_serial(const ValidatedDevice& device, std::span<const double> delta_grid) {
    check_grid(delta_grid);
    SweepResult out{{delta_grid.begin(), delta_grid.end()}, {}, device};
    out.matrices.reserve(delta_grid.size());
    for (double d : delta_grid) out.matrices.push_back(scattering_at(device, d));
    return out;
}

SweepResult sweep(const ValidatedDevice& device, std::span<const double> delta_grid) {
    check_grid(delta_grid);
    const auto n = static_cast<std::ptrdiff_t>(delta_grid.size());
    SweepResult out{{delta_grid.begin(), delta_grid.end()}, std::vector<ScatteringMatrix>(delta_grid.size()), device};
    std::vector<char> failed(delta_grid.size(), 0);

#pragma omp parallel for schedule(static) num_threads(sweep_threads())
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        try {
            out.matrices[static_cast<std::size_t>(k)] = scattering_at(device, delta_grid[static_cast<std::size_t>(k)]);
        } catch (const SingularMatrixError&) {
            failed[static_cast<std::size_t>(k)] = 1;
        }
    }

    // Report the lowest offending δ, as the serial path would.
    auto bad = std::find(failed.begin(), failed.end(), 1);
    if (bad != failed.end()) throw SingularMatrixError(delta_grid[static_cast<std::size_t>(bad - failed.begin())]);
    return out;
}

double sbb_closed_form(double rho_ab, double rho_bc, double rho_ac) {
    const double denom = rho_ac + rho_bc - rho_ab - 1.0;
    if (std::abs(denom) < 1e-15) {
        throw Error(ErrorKind::DomainError, "sbb_closed_form is at its pole rho_ac + rho_bc - rho_ab = 1");
    }
    return -1.0 + 2.0 * (rho_ac - 1.0) / denom;
}

double directionality_threshold(double gain_bc) {
    if (!(gain_bc >= 1.0)) throw Error(ErrorKind::DomainError, fmt("directionality_threshold needs G >= 1, got %.9g", gain_bc));
    return 1.0 - 1.0 / gain_bc;
}

bool is_stable(const ValidatedDevice& device) {
    const Matrix3c m = build_dynamics_matrix(device, 0.0);
    Eigen::ComplexEigenSolver<Matrix3c> solver(m, false);
    const double scale = m.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < 3; ++k) {
        if (!(solver.eigenvalues()[k].real() > 1e-12 * scale)) return false;
    }
    return true;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g;
    if (n == 0) return g;
    if (n == 1) return {0.5 * (lo + hi)};
    g.resize(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) g[k] = lo + step * static_cast<double>(k);
    g.back() = hi;
    return g;
}

}  // namespace nonrecip
