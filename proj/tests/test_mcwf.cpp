#include <catch2/catch_amalgamated.hpp>

#include "biphoton/dynamics.hpp"
#include "biphoton/mcwf.hpp"
#include "support.hpp"

using namespace biphoton;

TEST_CASE("mcwf: no collapse channels reproduces unitary evolution", "[mcwf]") {
    const double omega = angular(0.9);
    HilbertSpace space{2, 0};
    Matrix h = Matrix::Zero(2, 2);
    h(0, 1) = 0.5 * omega;
    h(1, 0) = 0.5 * omega;
    LindbladGenerator gen(space, testsup::coo_from_dense(h), {}, {}, true);

    Vector psi = Vector::Zero(2);
    psi(0) = 1.0;
    const auto traj = mcwf_trajectory(gen, psi, 0.0, 2.3, 5);
    CHECK(traj.jumps.empty());

    const Matrix rho = propagate_me(gen, pure_density(psi), 0.0, 2.3, 1e-10);
    const Matrix diff = pure_density(traj.state) - rho;
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("mcwf: deterministic for a fixed seed", "[mcwf]") {
    auto gen = testsup::two_level(angular(1.0), 0.0, 1.3);
    Vector psi = Vector::Zero(2);
    psi(0) = 1.0;
    const auto a = mcwf_trajectory(gen, psi, 0.0, 6.0, 99);
    const auto b = mcwf_trajectory(gen, psi, 0.0, 6.0, 99);
    REQUIRE(a.jumps.size() == b.jumps.size());
    for (std::size_t i = 0; i < a.jumps.size(); ++i) {
        CHECK(a.jumps[i].time == b.jumps[i].time);
        CHECK(a.jumps[i].channel == b.jumps[i].channel);
    }
    CHECK((a.state - b.state).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mcwf: jump-time histogram of a decaying atom is exponential", "[mcwf]") {
    // Excited two-level atom, no drive: first-jump times ~ Exp(gamma).
    const double gamma = 2.0;
    HilbertSpace space{2, 0};
    Matrix l = Matrix::Zero(2, 2);
    l(0, 1) = 1.0;
    std::vector<CollapseChannel> ch;
    ch.push_back({testsup::coo_from_dense(l), gamma, ChannelKind::spontaneous, "decay"});
    LindbladGenerator gen(space, CooOp(2), {}, std::move(ch), true);

    Vector psi = Vector::Zero(2);
    psi(1) = 1.0;
    const int n = 10000;
    const double t_max = 6.0;
    std::vector<double> times;
    times.reserve(n);
    for (int i = 0; i < n; ++i) {
        const auto traj = mcwf_trajectory(gen, psi, 0.0, t_max, 1000 + i);
        if (!traj.jumps.empty()) times.push_back(traj.jumps.front().time);
    }
    // With gamma*t_max = 12 essentially every trajectory jumps.
    REQUIRE(times.size() > static_cast<std::size_t>(n - 10));

    // Chi-square against the exponential law on equal-probability bins.
    const int bins = 20;
    std::vector<int> counts(bins, 0);
    for (double t : times) {
        const double u = 1.0 - std::exp(-gamma * t);  // uniform under H0
        int b = static_cast<int>(u * bins);
        b = std::clamp(b, 0, bins - 1);
        ++counts[b];
    }
    const double expected = static_cast<double>(times.size()) / bins;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const double p = testsup::gamma_q(0.5 * (bins - 1), 0.5 * chi2);
    INFO("chi2 = " << chi2 << ", p = " << p);
    CHECK(p > 0.01);
}

TEST_CASE("mcwf: trajectory average converges to the master equation", "[mcwf]") {
    const testsup::LambdaToy toy{HilbertSpace{3, 1}, 3.0, 4.0, 5.0, 1.0, 1.0};
    auto gen = toy.generator(true);
    const Vector psi0 = toy.initial();
    const double t1 = 2.0;
    const Matrix ref = propagate_me(gen, pure_density(psi0), 0.0, t1, 1e-9);
    const int dim = gen.dim();

    using RMatrix = Eigen::MatrixXd;
    auto run_batch = [&](int n, std::uint64_t seed_base, Matrix& mean, RMatrix& stderr_re,
                         RMatrix& stderr_im) {
        RMatrix sum_re = RMatrix::Zero(dim, dim), sum_im = RMatrix::Zero(dim, dim);
        RMatrix sq_re = RMatrix::Zero(dim, dim), sq_im = RMatrix::Zero(dim, dim);
        for (int i = 0; i < n; ++i) {
            const auto traj =
                mcwf_trajectory(gen, psi0, 0.0, t1, splitmix64(seed_base + i));
            const Matrix p = pure_density(traj.state);
            const RMatrix pre = p.real(), pim = p.imag();
            sum_re += pre;
            sum_im += pim;
            sq_re += pre.cwiseProduct(pre);
            sq_im += pim.cwiseProduct(pim);
        }
        const RMatrix mre = sum_re / double(n), mim = sum_im / double(n);
        mean = mre.cast<complexd>() + complexd{0.0, 1.0} * mim.cast<complexd>();
        stderr_re =
            ((sq_re / double(n) - mre.cwiseProduct(mre)).cwiseMax(0.0) / double(n)).cwiseSqrt();
        stderr_im =
            ((sq_im / double(n) - mim.cwiseProduct(mim)).cwiseMax(0.0) / double(n)).cwiseSqrt();
    };

    Matrix mean4;
    RMatrix se4_re, se4_im;
    run_batch(10000, 777, mean4, se4_re, se4_im);

    SECTION("elementwise agreement within 3 Monte-Carlo standard errors") {
        int violations = 0;
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                const double dre = std::abs(mean4(r, c).real() - ref(r, c).real());
                const double dim_ = std::abs(mean4(r, c).imag() - ref(r, c).imag());
                if (dre > 3.0 * se4_re(r, c) + 1e-4) ++violations;
                if (dim_ > 3.0 * se4_im(r, c) + 1e-4) ++violations;
            }
        }
        // A handful of 3-sigma outliers among dim^2 entries is expected
        // at the ~1% level; none should be gross.
        CHECK(violations <= 4);
        CHECK((mean4 - ref).cwiseAbs().maxCoeff() < 0.02);
    }

    SECTION("error falls at the Monte-Carlo 1/sqrt(N) rate") {
        // Average the N = 1e3 error over independent batches; a single
        // batch norm is too luck-sensitive for a ratio test.
        double err3 = 0.0;
        const int batches = 8;
        for (int b = 0; b < batches; ++b) {
            Matrix mean3;
            RMatrix se3_re, se3_im;
            run_batch(1000, 12345 + 1000 * b, mean3, se3_re, se3_im);
            err3 += (mean3 - ref).norm();
        }
        err3 /= batches;
        const double err4 = (mean4 - ref).norm();
        INFO("mean err(1e3) = " << err3 << ", err(1e4) = " << err4);
        CHECK(err4 < err3);
        CHECK(err3 / err4 > 1.8);
        CHECK(err3 / err4 < 5.5);
    }
}
