#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fractal_zeta/merom.hpp"
#include "fractal_zeta/sets.hpp"
#include "fractal_zeta/tubes.hpp"

namespace fzeta {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

// Trial division; m >= 2.
std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t m);

// Exact rank over Q by fraction-free (Bareiss) elimination on arbitrary
// precision integers.
int rational_rank(const IntMatrix& matrix);

struct QuasiConstruction {
    double D = 0.0;
    std::vector<std::int64_t> moduli;
    std::vector<double> scales;          // a_i = m_i^(-1/D)
    std::vector<double> periods;         // T_i = log(m_i) / D
    std::vector<std::int64_t> primes;    // shared prime basis, ascending
    IntMatrix exponent_matrix;           // row i factors m_i over primes
    int rank = 0;
    bool certified = false;              // rank == number of moduli
    std::vector<std::string> warnings;
};

struct QuasiperiodicSet {
    FractalSet set;
    QuasiConstruction construction;
};

// Union of C^(m_i, a_i) on [2i, 2i + 1], i = 0..n-1.
QuasiperiodicSet build_quasiperiodic(double D, const std::vector<std::int64_t>& moduli);

// Lattices D + (2 pi / T_i) i Z. The origin is recorded as removable for the
// distance zeta of the union (each Cantor term is regular there).
ComplexDimensions union_dims(const QuasiConstruction& c);
// sum_i 1 / (1 - m_i a_i^s).
MeromorphicZeta union_kernel_model(const QuasiConstruction& c);

struct PoleCoincidence {
    std::size_t i, j;
    std::int64_t k_i, k_j;  // k_i p_i = k_j p_j with k != 0
};

// Nonzero lattice points shared by two families with |k| <= k_max, decided
// on exponent vectors: k_i p_i = k_j p_j iff m_j^(k_i) = m_i^(k_j).
std::vector<PoleCoincidence> coincident_poles(const QuasiConstruction& c, std::int64_t k_max = 10000);

struct Convergent {
    std::string p, q;  // exact decimal strings
    double value;
    double residual;   // |x - p/q| q^2
};

struct IrrationalityEvidence {
    std::vector<std::string> partial_quotients;  // a_0, a_1, ...
    std::vector<Convergent> convergents;
    bool terminated = false;  // expansion ended: x is rational at working precision
    int depth_reached = 0;    // partial quotients after a_0
    double max_partial_quotient = 0.0;
};

// log(num) / log(den) in 100-digit arithmetic.
IrrationalityEvidence irrationality_evidence_log_ratio(std::int64_t num, std::int64_t den, int depth);
// Exact rational p / q.
IrrationalityEvidence irrationality_evidence(std::int64_t p, std::int64_t q, int depth);
// A double is a dyadic rational; expansion stops once the remainder falls
// below a few ulps of x.
IrrationalityEvidence irrationality_evidence(double x, int depth);

enum class SpectralWindow { Hann, FlatTop, Rectangular };
const char* to_string(SpectralWindow w);

struct SpectrumPoint {
    double frequency;  // cycles per unit tau
    double power;
};

// Windowed periodogram of samples - mean, zero padded by `pad`.
std::vector<SpectrumPoint> quasi_spectrum(std::span<const double> samples, double dtau,
                                          SpectralWindow window = SpectralWindow::Hann, int pad = 16);

// G(tau) = |A_t| / t^(N - D) at t = exp(-tau), tau = tau0 + k dtau.
std::vector<double> sample_profile(const TubeModel& tube, double D, double tau0, double dtau, int n);

struct PeriodMatch {
    double period;
    bool recovered = false;
    double peak_frequency = 0.0;
    double offset_bins = 0.0;
    double peak_db = 0.0;  // relative to the noise floor
};

struct SpectralPeak {
    double frequency;
    double db_above_floor;
    std::string role;  // fundamental, harmonic or spurious
};

struct PeriodRecovery {
    std::vector<PeriodMatch> matches;
    std::vector<SpectralPeak> peaks;
    bool flat = false;          // no oscillation above round-off
    bool inconclusive = false;  // strongest peak < 10 dB above floor
    bool all_recovered = false;
    int spurious = 0;
    double bin_width = 0.0;
};

struct PeriodOptions {
    SpectralWindow window = SpectralWindow::Hann;
    int pad = 16;
    double match_bins = 2.0;
    double min_peak_db = 10.0;
    double peak_range_db = 25.0;  // peaks reported down to this far below the strongest
    int max_harmonic = 16;
};

// samples span n dtau; the span must be at least 5 max T_i.
PeriodRecovery period_recover(std::span<const double> samples, double dtau, std::span<const double> candidates,
                              const PeriodOptions& opt = {});

// A x [0, L]^d.
FractalSet grill_quasi(const QuasiperiodicSet& q, int d, double L);

}  // namespace fzeta
