#include "bcq/galerkin.hpp"

#include <cmath>

#include "bcq/fd_oracle.hpp"
#include "bcq/prng.hpp"

namespace bcq {

double lifting_value(int k, const ChannelParams& p, double x) {
    if (k == 0) return x / p.L;
    const double ak = std::abs(static_cast<double>(k));
    // sinh(|k| x)/sinh(|k| L) = e^{|k|(x-L)} (1 - e^{-2|k|x}) / (1 - e^{-2|k|L}).
    return std::exp(ak * (x - p.L)) * (1.0 - std::exp(-2.0 * ak * x)) /
           (1.0 - std::exp(-2.0 * ak * p.L));
}

Eigen::VectorXd lifting_profile(int k, const ChannelParams& p, int N) {
    if (N < 2) throw ConfigError("grid too small");
    const double h = p.L / (N + 1);
    Eigen::VectorXd w(N);
    for (int i = 0; i < N; ++i) w[i] = lifting_value(k, p, (i + 1) * h);
    return w;
}

double ControlSignal::norm() const {
    if (values.size() == 0) return 0.0;
    const double seg = T / values.size();
    return std::sqrt(values.squaredNorm() * seg);
}

ControlSignal ControlSignal::zero(int k, int segments, double T) {
    ControlSignal h;
    h.k = k;
    h.T = T;
    h.values = Eigen::VectorXcd::Zero(segments);
    return h;
}

ModeSystem::ModeSystem(int k, const ChannelParams& p, int N, double dt, double T)
    : k_(k), p_(p), N_(N), dt_(dt), T_(T), h_(p.L / (N + 1)) {
    if (N < 64) throw ConfigError("mode system needs N >= 64");
    if (!(dt > 0.0) || !(T > 0.0)) throw ConfigError("dt and T must be positive");
    n_steps_ = static_cast<int>(std::llround(T / dt));
    if (n_steps_ < 1 || std::abs(n_steps_ * dt - T) > 1e-9 * T)
        throw ConfigError("dt must divide T");

    const double kk = static_cast<double>(k) * k;
    D2_ = dirichlet_second_difference(N, p.L);
    Eigen::SparseMatrix<double> I(N, N);
    I.setIdentity();

    if (k != 0) {
        const Eigen::SparseMatrix<double> D4 = clamped_fourth_difference(N, p.L);
        A4_ = p.nu * (D4 - 2.0 * kk * D2_ + kk * kk * I);
        B_ = kk * I - D2_;
    } else {
        // Diagnostic 0-mode: the velocity average u1 obeys the plain heat
        // equation; pose it as B du/dt = -A4 u with B = identity mass.
        A4_ = p.nu * (-D2_).eval();
        B_ = I;
    }
    lifting_ = lifting_profile(k, p, N);

    const double cu = 0.5 * dt_;
    vel_solver_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    vel_solver_->compute(Eigen::SparseMatrix<double>(B_ + cu * A4_));
    if (vel_solver_->info() != Eigen::Success)
        throw NumericError("velocity step factorization failed");
    vel_rhs_op_ = B_ - cu * A4_;

    const double ct = 0.5 * dt_ * p.alpha;
    Eigen::SparseMatrix<double> Dk = (D2_ - kk * I).eval();
    heat_solver_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    heat_solver_->compute(Eigen::SparseMatrix<double>(I - ct * Dk));
    if (heat_solver_->info() != Eigen::Success)
        throw NumericError("heat step factorization failed");
    heat_rhs_op_ = I + ct * Dk;
}

namespace {

Eigen::VectorXcd solve_complex(const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& s,
                               const Eigen::VectorXcd& rhs) {
    Eigen::VectorXd re = s.solve(rhs.real());
    Eigen::VectorXd im = s.solve(rhs.imag());
    Eigen::VectorXcd out(rhs.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

}  // namespace

double ModeSystem::velocity_energy(const Eigen::VectorXcd& u) const {
    const Eigen::VectorXcd Bu = B_ * u;
    double e = 0.0;
    for (int i = 0; i < u.size(); ++i)
        e += (std::conj(u[i]) * Bu[i]).real();
    return e * h_;
}

double ModeSystem::theta_norm(const Eigen::VectorXcd& theta) const {
    return std::sqrt(theta.squaredNorm() * h_);
}

void ModeSystem::advance(Eigen::VectorXcd& u, Eigen::VectorXcd& theta_h,
                         Complex hcur) const {
    const double kk = static_cast<double>(k_) * k_;
    const Eigen::VectorXcd theta_phys_n = theta_h + lifting_.cast<Complex>() * hcur;
    const Eigen::VectorXcd theta_h_next =
        solve_complex(*heat_solver_, heat_rhs_op_ * theta_h);
    const Eigen::VectorXcd theta_phys_next =
        theta_h_next + lifting_.cast<Complex>() * hcur;

    Eigen::VectorXcd rhs = vel_rhs_op_ * u;
    if (k_ != 0) rhs += (0.5 * dt_ * kk) * (theta_phys_n + theta_phys_next);
    u = solve_complex(*vel_solver_, rhs);
    theta_h = theta_h_next;
}

ModeSystem::Trajectory ModeSystem::simulate(const Eigen::VectorXcd& u0,
                                            const Eigen::VectorXcd& theta0,
                                            const ControlSignal& h) const {
    if (u0.size() != N_ || theta0.size() != N_)
        throw ConfigError("state size mismatch");
    const int M = h.segments();
    if (M < 1 || n_steps_ % M != 0)
        throw ConfigError("segment count must divide the number of time steps");
    const int steps_per_seg = n_steps_ / M;

    Trajectory tr;
    tr.times = Eigen::VectorXd::LinSpaced(n_steps_ + 1, 0.0, T_);
    tr.velocity.resize(N_, n_steps_ + 1);
    tr.theta.resize(N_, n_steps_ + 1);
    tr.boundary_trace.resize(n_steps_ + 1);

    Eigen::VectorXcd u = u0;
    // Homogenized temperature: theta = theta_h + w h(t). The physical theta
    // is continuous across segment jumps; theta_h absorbs them.
    Complex hcur = h.values[0];
    Eigen::VectorXcd theta_h = theta0 - lifting_.cast<Complex>() * hcur;

    tr.velocity.col(0) = u;
    tr.theta.col(0) = theta0;
    tr.boundary_trace[0] = hcur;

    for (int s = 0; s < n_steps_; ++s) {
        const int seg = s / steps_per_seg;
        if (s % steps_per_seg == 0 && seg > 0) {
            const Complex hnew = h.values[seg];
            theta_h += lifting_.cast<Complex>() * (hcur - hnew);
            hcur = hnew;
        }
        advance(u, theta_h, hcur);
        tr.velocity.col(s + 1) = u;
        tr.theta.col(s + 1) = theta_h + lifting_.cast<Complex>() * hcur;
        tr.boundary_trace[s + 1] = hcur;
    }
    return tr;
}

void ModeSystem::simulate_terminal(const Eigen::VectorXcd& u0,
                                   const Eigen::VectorXcd& theta0, const ControlSignal& h,
                                   Eigen::VectorXcd& uT, Eigen::VectorXcd& thetaT) const {
    if (u0.size() != N_ || theta0.size() != N_)
        throw ConfigError("state size mismatch");
    const int M = h.segments();
    if (M < 1 || n_steps_ % M != 0)
        throw ConfigError("segment count must divide the number of time steps");
    const int steps_per_seg = n_steps_ / M;

    Eigen::VectorXcd u = u0;
    Complex hcur = h.values[0];
    Eigen::VectorXcd theta_h = theta0 - lifting_.cast<Complex>() * hcur;

    for (int s = 0; s < n_steps_; ++s) {
        const int seg = s / steps_per_seg;
        if (s % steps_per_seg == 0 && seg > 0) {
            const Complex hnew = h.values[seg];
            theta_h += lifting_.cast<Complex>() * (hcur - hnew);
            hcur = hnew;
        }
        advance(u, theta_h, hcur);
    }
    uT = u;
    thetaT = theta_h + lifting_.cast<Complex>() * hcur;
}

ModeSystem assemble_mode_system(ModeIndex k, const ChannelParams& p, int N, double dt,
                                double T) {
    return ModeSystem(k.k, p, N, dt, T);
}

ModeSystem assemble_zero_mode_system(const ChannelParams& p, int N, double dt, double T) {
    return ModeSystem(0, p, N, dt, T);
}

TruncationBasis truncation_basis(const ModeSystem& sys, int n_u, int n_theta) {
    const int N = sys.grid_size();
    if (n_u < 1 || n_theta < 1 || n_u > N || n_theta > N)
        throw ConfigError("truncation sizes out of range");
    TruncationBasis basis;

    PencilEigenResult eig =
        smallest_pencil_eigens(sys.stokes_stiffness(), sys.stokes_mass(), n_u);
    basis.stokes_vectors = eig.vectors;
    basis.stokes_lambdas = -eig.sigmas;
    // Scale to B-orthonormality against the grid-weighted inner product.
    basis.stokes_vectors /= std::sqrt(sys.spacing());

    // Heat block eigenvectors are discrete sine modes, known in closed form.
    const double h = sys.spacing();
    const double kk = static_cast<double>(sys.k()) * sys.k();
    const double L = sys.params().L;
    basis.heat_vectors.resize(N, n_theta);
    basis.heat_lambdas.resize(n_theta);
    for (int j = 1; j <= n_theta; ++j) {
        for (int i = 0; i < N; ++i)
            basis.heat_vectors(i, j - 1) = std::sin(j * M_PI * (i + 1) * h / L);
        basis.heat_vectors.col(j - 1) /=
            std::sqrt(basis.heat_vectors.col(j - 1).squaredNorm() * h);
        const double d2 = -4.0 / (h * h) *
                          std::pow(std::sin(j * M_PI / (2.0 * (N + 1))), 2);
        basis.heat_lambdas[j - 1] = sys.params().alpha * (d2 - kk);
    }
    return basis;
}

Eigen::VectorXcd project_state(const ModeSystem& sys, const TruncationBasis& basis,
                               const Eigen::VectorXcd& u, const Eigen::VectorXcd& theta) {
    const int nu = basis.n_u(), nt = basis.n_theta();
    Eigen::VectorXcd coords(nu + nt);
    const Eigen::VectorXcd Bu = sys.stokes_mass() * u * sys.spacing();
    for (int i = 0; i < nu; ++i)
        coords[i] = basis.stokes_vectors.col(i).cast<Complex>().dot(Bu);
    for (int i = 0; i < nt; ++i)
        coords[nu + i] =
            basis.heat_vectors.col(i).cast<Complex>().dot(theta) * sys.spacing();
    return coords;
}

void synthesize_state(const ModeSystem& sys, const TruncationBasis& basis,
                      const Eigen::VectorXcd& coords, Eigen::VectorXcd& u,
                      Eigen::VectorXcd& theta) {
    const int nu = basis.n_u(), nt = basis.n_theta();
    if (coords.size() != nu + nt) throw ConfigError("coordinate size mismatch");
    u = basis.stokes_vectors.cast<Complex>() * coords.head(nu);
    theta = basis.heat_vectors.cast<Complex>() * coords.tail(nt);
    (void)sys;
}

InputStateMap input_state_map(const ModeSystem& sys, const TruncationBasis& basis,
                              int segments) {
    if (segments < 1) throw ConfigError("segments must be >= 1");
    InputStateMap out;
    const int dim = basis.n_u() + basis.n_theta();
    out.map.resize(dim, segments);
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(sys.grid_size());
    for (int m = 0; m < segments; ++m) {
        ControlSignal h = ControlSignal::zero(sys.k(), segments, sys.horizon());
        h.values[m] = Complex(1.0, 0.0);
        Eigen::VectorXcd uT, thetaT;
        sys.simulate_terminal(zero, zero, h, uT, thetaT);
        out.map.col(m) = project_state(sys, basis, uT, thetaT);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.map);
    out.singular_values = svd.singularValues();
    return out;
}

ControlSignal prolong_control(const ControlSignal& h, int segments) {
    if (segments < h.segments() || segments % h.segments() != 0)
        throw ConfigError("prolongation target must be a multiple of the segment count");
    const int rep = segments / h.segments();
    ControlSignal out;
    out.k = h.k;
    out.T = h.T;
    out.values.resize(segments);
    for (int m = 0; m < segments; ++m) out.values[m] = h.values[m / rep];
    return out;
}

ControlExperiment synthesize_control(const ModeSystem& sys, const TruncationBasis& basis,
                                     const Eigen::VectorXcd& u0,
                                     const Eigen::VectorXcd& theta0,
                                     const Eigen::VectorXcd& target_coords, int segments,
                                     double ridge, const ControlSignal* warm_start) {
    if (ridge < 0.0) throw ConfigError("ridge must be >= 0");
    ControlExperiment ex;
    ex.k = sys.k();
    ex.N = sys.grid_size();
    ex.n_u = basis.n_u();
    ex.n_theta = basis.n_theta();
    ex.segments = segments;
    ex.T = sys.horizon();
    ex.dt = sys.dt();
    ex.ridge = ridge;
    ex.x0_coords = project_state(sys, basis, u0, theta0);
    ex.target_coords = target_coords;

    InputStateMap ism = input_state_map(sys, basis, segments);
    ex.gramian_sv = ism.singular_values;
    ex.smallest_sv = ism.singular_values.minCoeff();

    // Free evolution of the initial state.
    Eigen::VectorXcd uF, thetaF;
    sys.simulate_terminal(u0, theta0, ControlSignal::zero(sys.k(), segments, sys.horizon()),
                          uF, thetaF);
    const Eigen::VectorXcd free_coords = project_state(sys, basis, uF, thetaF);
    const Eigen::VectorXcd rhs = target_coords - free_coords;

    // Ridge-regularized least squares through the SVD of the input map.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ism.map,
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::VectorXcd y = svd.matrixU().adjoint() * rhs;
    for (int i = 0; i < y.size(); ++i) {
        const double s = sv[i];
        double f;
        if (ridge > 0.0)
            f = s / (s * s + ridge);
        else
            f = (s > sv[0] * 1e-14) ? 1.0 / s : 0.0;
        y[i] *= f;
    }
    ControlSignal h;
    h.k = sys.k();
    h.T = sys.horizon();
    h.values = svd.matrixV() * y;

    const double tn = target_coords.norm();
    auto evaluate = [&](const ControlSignal& sig, Eigen::VectorXcd& coords) {
        Eigen::VectorXcd uT, thetaT;
        sys.simulate_terminal(u0, theta0, sig, uT, thetaT);
        coords = project_state(sys, basis, uT, thetaT);
        return tn > 0.0 ? (coords - target_coords).norm() / tn : coords.norm();
    };

    Eigen::VectorXcd coords_ls;
    double eps_ls = evaluate(h, coords_ls);
    ex.control = h;
    ex.terminal_coords = coords_ls;
    ex.achieved_eps = eps_ls;

    if (warm_start && segments % warm_start->segments() == 0) {
        const ControlSignal carried = prolong_control(*warm_start, segments);
        Eigen::VectorXcd coords_ws;
        const double eps_ws = evaluate(carried, coords_ws);
        if (eps_ws < eps_ls) {
            ex.control = carried;
            ex.terminal_coords = coords_ws;
            ex.achieved_eps = eps_ws;
        }
    }
    ex.control_norm = ex.control.norm();
    return ex;
}

Eigen::VectorXcd recover_u1(const ModeSystem& sys, const Eigen::VectorXcd& u2) {
    if (sys.k() == 0) throw ConfigError("u1 recovery needs k != 0");
    const int N = sys.grid_size();
    if (u2.size() != N) throw ConfigError("state size mismatch");
    const double h = sys.spacing();
    Eigen::VectorXcd du(N);
    for (int i = 0; i < N; ++i) {
        const Complex left = i > 0 ? u2[i - 1] : Complex(0.0, 0.0);
        const Complex right = i + 1 < N ? u2[i + 1] : Complex(0.0, 0.0);
        du[i] = (right - left) / (2.0 * h);
    }
    return Complex(0.0, 1.0) / static_cast<double>(sys.k()) * du;
}

Eigen::VectorXcd seeded_unit_target(int dim, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Eigen::VectorXcd t(dim);
    for (int i = 0; i < dim; ++i) {
        // Box-Muller from two uniforms keeps the direction isotropic.
        const double u1 = std::max(rng.uniform01(), 1e-300);
        const double u2 = rng.uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        t[i] = Complex(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
    }
    t /= t.norm();
    return t;
}

}  // namespace bcq
