#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qjump/generator.hpp"
#include "qjump/linalg.hpp"
#include "qjump/unraveling.hpp"

namespace qjump::oscillator {

/// Index 0 is p and index 1 is x throughout, i.e. A = (p, x).
inline constexpr Eigen::Index kP = 0;
inline constexpr Eigen::Index kX = 1;

/// Damped harmonic oscillator in an N-level Fock truncation.
///
/// D is the 2x2 Hermitian PSD diffusion matrix over (p, x). D_11, D_22 and
/// Re D_12 are diffusion coefficients; Im D_12 = hbar lambda / 2 sets the
/// friction constant.
struct OscillatorParams {
    Eigen::Index levels = 20;
    double mass = 1.0;
    double omega = 1.0;
    double hbar = 1.0;
    Eigen::Matrix2cd diffusion = Eigen::Matrix2cd::Zero();

    /// lambda = (2/hbar) Im D_12
    double friction() const { return 2.0 / hbar * diffusion(kP, kX).imag(); }

    /// Builds D from its four real parameters.
    static Eigen::Matrix2cd make_diffusion(double d11, double d22, double re_d12, double im_d12);
    /// m = omega = hbar = 1, N = 20, D_22 = 0.5, everything else 0.
    static OscillatorParams position_diffusion_default();
};

struct Operators {
    ComplexMatrix hamiltonian;  // hbar omega (a^dagger a + 1/2)
    ComplexMatrix position;
    ComplexMatrix momentum;
    ComplexMatrix number;
    ComplexMatrix annihilation;
};

/// Throws InvalidGenerator for N < 2 or non-positive m, omega, hbar.
Operators build_operators(const OscillatorParams& params);

/// GKS spec that reproduces
///   -(i/hbar)[H0, rho] - (i/hbar) lambda [x, {p, rho}] - (1/hbar^2) Re D_ab [A_a, [A_b, rho]].
/// The friction commutator is absorbed as H = H0 + (lambda/2){x, p} with
/// couplings (p, x) and coefficient matrix D; the identity is exact in the
/// truncated space.
GeneratorSpec oscillator_generator(const OscillatorParams& params);
/// Same construction without the GeneratorSpec invariant checks, so that a
/// bad D can be handed to validate_generator.
GeneratorSpec oscillator_generator_unchecked(const OscillatorParams& params);

/// Literal three-term evaluation of the oscillator generator, kept separate
/// from the GKS route.
ComplexMatrix literal_generator(const OscillatorParams& params, const ComplexMatrix& rho);

/// sigma_ab = <A_a A_b> - <A_a><A_b> in operator order. Hermitian PSD;
/// Im sigma_12 = -hbar/2 on truncation-safe states.
Eigen::Matrix2cd sigma(const StateVector& psi, const ComplexMatrix& x, const ComplexMatrix& p);
/// Real part of sigma, i.e. the symmetrized covariance.
Eigen::Matrix2d symmetrized_sigma(const Eigen::Matrix2cd& s);

/// Re D_ab sigma_ab - hbar^2 lambda / 2. The total decay rate equals
/// (2/hbar^2) times this value.
double hasse_defect(const StateVector& psi, const OscillatorParams& params);

/// W' = (2/hbar^2) D_ab (A_a - <A_a>) psi psi^dagger (A_b - <A_b>)
ComplexMatrix closed_form_modified_rate_operator(const StateVector& psi, const OscillatorParams& params);

/// Channels of the oscillator W' without a d-dimensional eigensolver.
///
/// With u_a = (A_a - <A_a>) psi, W' acts inside span{u_p, u_x}; writing
/// phi = C_r u_r reduces W' phi = w phi to the 2x2 Hermitian problem
/// sigma^{1/2} gamma sigma^{1/2} z = w z with gamma = 2D/hbar^2 and
/// C = sigma^{-1/2} z. When D_11 = D_12 = 0 the single channel
/// phi = sigma_22^{-1/2} (x - <x>) psi with rate (2/hbar^2) D_22 sigma_22 is
/// returned directly.
RateReport closed_form_channels(const StateVector& psi, const OscillatorParams& params);

/// The frictional flow written out term by term:
///   -(i/hbar)(H0 - <H0>) psi
///   - (i/hbar) lambda (x p + x <p> - <x> p - <x p>) psi
///   - (1/hbar^2) Re D_ab [(A_a - <A_a>)(A_b - <A_b>) - sigma_ab] psi
ComplexVector explicit_frictional_rhs(const StateVector& psi, const OscillatorParams& params);

/// H_fr = H0 + lambda [1/2 {x,p} - 1/2 <{x,p}> + x<p> - <x>p]
///        - (i/hbar) Re D_ab [(A_a - <A_a>)(A_b - <A_b>) - sigma_ab]
/// -(i/hbar)(H_fr - <H0>) psi equals the flow where [x, p] psi = i hbar psi.
ComplexMatrix frictional_hamiltonian(const StateVector& psi, const OscillatorParams& params);

/// Occupation of the top two Fock levels.
double top_occupancy(const StateVector& psi);
/// top_occupancy <= threshold (default 1e-8).
bool truncation_safe(const StateVector& psi, double threshold = 1e-8);

StateVector fock_state(Eigen::Index levels, Eigen::Index n);
/// Truncated coherent state e^{-|alpha|^2/2} alpha^n / sqrt(n!), renormalized.
StateVector coherent_state(Eigen::Index levels, std::complex<double> alpha);

}  // namespace qjump::oscillator
