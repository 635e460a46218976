#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <memory>

#include "bcq/types.hpp"

namespace bcq {

/// Dirichlet lifting of unit boundary data at x2 = L for mode k:
/// w(x2) = sinh(|k| x2)/sinh(|k| L), the solution of -alpha (w'' - k^2 w) = 0
/// with w(0) = 0, w(L) = 1; for the k = 0 diagnostic it degenerates to x2/L.
/// Evaluated in exponential-ratio form, overflow-safe for large |k| L.
double lifting_value(int k, const ChannelParams& p, double x);

/// The lifting sampled on the N interior grid points.
Eigen::VectorXd lifting_profile(int k, const ChannelParams& p, int N);

/// Piecewise-constant boundary control for one mode: value m applies on
/// [m T/M, (m+1) T/M).
struct ControlSignal {
    int k = 0;
    Eigen::VectorXcd values;  // one complex amplitude per segment
    double T = 1.0;

    int segments() const { return static_cast<int>(values.size()); }
    double norm() const;  // discrete L2(0,T) norm
    static ControlSignal zero(int k, int segments, double T);
};

/// Semidiscrete per-mode system. For k != 0 the state is (u2 profile, theta
/// profile) with the velocity evolved in stream/vorticity form,
///
///   (k^2 - d22) du2/dt = -nu (d2222 - 2 k^2 d22 + k^4) u2 + k^2 theta,
///
/// clamped u2, and theta the boundary-controlled heat equation homogenized by
/// the lifting w: theta = theta0 + w h(t). For the k = 0 diagnostic the state
/// is (u1 profile, theta profile); u1 obeys the autonomous heat equation and
/// is structurally decoupled from the control.
class ModeSystem {
  public:
    ModeSystem(int k, const ChannelParams& p, int N, double dt, double T);

    int k() const { return k_; }
    const ChannelParams& params() const { return p_; }
    int grid_size() const { return N_; }
    double dt() const { return dt_; }
    double horizon() const { return T_; }
    int steps() const { return n_steps_; }
    double spacing() const { return h_; }

    const Eigen::SparseMatrix<double>& stokes_stiffness() const { return A4_; }
    const Eigen::SparseMatrix<double>& stokes_mass() const { return B_; }
    const Eigen::VectorXd& lifting() const { return lifting_; }

    /// Discrete Stokes energy u* B u (|u2'|^2 + k^2 |u2|^2 against the grid
    /// weight); for k = 0 this is the plain grid-weighted L2 norm squared.
    double velocity_energy(const Eigen::VectorXcd& u) const;
    double theta_norm(const Eigen::VectorXcd& theta) const;

    struct Trajectory {
        Eigen::VectorXd times;
        Eigen::MatrixXcd velocity;  // N x (steps+1)
        Eigen::MatrixXcd theta;     // physical temperature, N x (steps+1)
        Eigen::VectorXcd boundary_trace;  // h(t) applied during step ending at times[i]
    };

    /// Crank-Nicolson integration from (u0, theta0) under the control h.
    /// The number of segments must divide the step count.
    Trajectory simulate(const Eigen::VectorXcd& u0, const Eigen::VectorXcd& theta0,
                        const ControlSignal& h) const;

    /// Terminal state only (no trajectory storage).
    void simulate_terminal(const Eigen::VectorXcd& u0, const Eigen::VectorXcd& theta0,
                           const ControlSignal& h, Eigen::VectorXcd& uT,
                           Eigen::VectorXcd& thetaT) const;

  private:
    /// One Crank-Nicolson step under the segment value hcur; both simulation
    /// entry points share this kernel so their arithmetic is identical.
    void advance(Eigen::VectorXcd& u, Eigen::VectorXcd& theta_h, Complex hcur) const;

    int k_;
    ChannelParams p_;
    int N_;
    double dt_, T_, h_;
    int n_steps_;
    Eigen::SparseMatrix<double> D2_, A4_, B_;
    Eigen::VectorXd lifting_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> vel_solver_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> heat_solver_;
    Eigen::SparseMatrix<double> vel_rhs_op_, heat_rhs_op_;
};

ModeSystem assemble_mode_system(ModeIndex k, const ChannelParams& p, int N, double dt,
                                double T);

/// Diagnostic 0-mode system (uncontrollable velocity average).
ModeSystem assemble_zero_mode_system(const ChannelParams& p, int N, double dt, double T);

/// Projection basis for desk-scale control experiments: the leading n_u
/// Stokes-pencil eigenvectors (B-orthonormal) and the leading n_theta discrete
/// sine modes of the heat block (orthonormal).
struct TruncationBasis {
    Eigen::MatrixXd stokes_vectors;  // N x n_u
    Eigen::VectorXd stokes_lambdas;  // decreasing
    Eigen::MatrixXd heat_vectors;    // N x n_theta
    Eigen::VectorXd heat_lambdas;    // decreasing
    int n_u() const { return static_cast<int>(stokes_vectors.cols()); }
    int n_theta() const { return static_cast<int>(heat_vectors.cols()); }
};

TruncationBasis truncation_basis(const ModeSystem& sys, int n_u, int n_theta);

/// Coordinates of (u, theta) in the truncation basis (size n_u + n_theta).
Eigen::VectorXcd project_state(const ModeSystem& sys, const TruncationBasis& basis,
                               const Eigen::VectorXcd& u, const Eigen::VectorXcd& theta);

/// Profiles spanned by the given coordinates.
void synthesize_state(const ModeSystem& sys, const TruncationBasis& basis,
                      const Eigen::VectorXcd& coords, Eigen::VectorXcd& u,
                      Eigen::VectorXcd& theta);

/// Input-to-state map at the truncation: column m is the projected terminal
/// state reached from rest by a unit control on segment m. Singular values
/// are the square-root Gramian spectrum.
struct InputStateMap {
    Eigen::MatrixXcd map;             // (n_u + n_theta) x segments
    Eigen::VectorXd singular_values;  // non-increasing
};

InputStateMap input_state_map(const ModeSystem& sys, const TruncationBasis& basis,
                              int segments);

/// Outcome of one terminal-targeting experiment.
struct ControlExperiment {
    int k, N, n_u, n_theta, segments;
    double T, dt, ridge;
    Eigen::VectorXcd x0_coords, target_coords, terminal_coords;
    ControlSignal control;
    Eigen::VectorXd gramian_sv;
    double achieved_eps = 0.0;   // ||x(T) - target|| / ||target||
    double control_norm = 0.0;
    double smallest_sv = 0.0;
};

/// Regularized least-squares synthesis min ||Phi h - (target - free)||^2
/// + ridge ||h||^2 via SVD, followed by an honest resimulation with the
/// synthesized control to measure the achieved terminal error.
///
/// A coarser control whose segment count divides `segments` prolongs exactly
/// onto the finer grid (piecewise-constant spaces nest); when `warm_start` is
/// given, the returned control is whichever of {least-squares candidate,
/// prolonged warm start} resimulates to the smaller terminal error, so
/// refining the segment grid never loses ground to resimulation noise.
ControlExperiment synthesize_control(const ModeSystem& sys, const TruncationBasis& basis,
                                     const Eigen::VectorXcd& u0,
                                     const Eigen::VectorXcd& theta0,
                                     const Eigen::VectorXcd& target_coords, int segments,
                                     double ridge,
                                     const ControlSignal* warm_start = nullptr);

/// Exact prolongation of a piecewise-constant control onto a finer segment
/// grid (segments must be a multiple of h.segments()).
ControlSignal prolong_control(const ControlSignal& h, int segments);

/// Horizontal velocity recovered from the incompressibility constraint,
/// u1 = i u2' / k with a central-difference derivative; by construction
/// ik u1 + u2' vanishes identically on the grid.
Eigen::VectorXcd recover_u1(const ModeSystem& sys, const Eigen::VectorXcd& u2);

/// Unit-norm random complex coordinate vector (seeded, platform-stable).
Eigen::VectorXcd seeded_unit_target(int dim, std::uint64_t seed);

}  // namespace bcq
