#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "tbsim/macro_rules.hpp"
#include "tbsim/parallel.hpp"
#include "tbsim/random.hpp"
#include "test_util.hpp"

using namespace tbsim;
using testutil::kind_of;

namespace {

constexpr double pi = std::numbers::pi;

// Peak-to-peak of the dark-conditioned ratio at eps1 = eps2 = 0.1, frozen
// from the path-sum oracle (maximum at phi = 0, minimum at phi = pi).
constexpr double kPinnedPeakToPeak = 0.040408161162019951;

double sum(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s;
}

}  // namespace

TEST_CASE("balanced interferometer")
{
    const StateVector in = single_excitation({1.0, 0.0, 0.0});
    const auto open0 = run_network(mach_zehnder(0.0), in);
    CHECK(std::abs(open0[0] - 1.0) < 1e-12);
    CHECK(std::abs(open0[1]) < 1e-12);
    const auto openpi = run_network(mach_zehnder(pi), in);
    CHECK(std::abs(openpi[0]) < 1e-12);
    CHECK(std::abs(openpi[1] - 1.0) < 1e-12);

    for (int k = 0; k <= 12; ++k) {
        const double phi = 2 * pi * k / 12;
        const auto p = run_network(mach_zehnder(phi), in);
        // hand algebra: forward port cos^2(phi/2)
        CHECK(std::abs(p[0] - std::pow(std::cos(phi / 2), 2)) < 1e-12);

        const auto fb = run_network(mach_zehnder(phi, MzBlock::ForwardPort), in);
        CHECK(std::abs(fb[0]) < 1e-12);
        CHECK(std::abs(fb[1] + fb[2] - 1.0) < 1e-12);
        CHECK(std::abs(sum(fb) - 1.0) < 1e-12);

        const auto arm = run_network(mach_zehnder(phi, MzBlock::Arm), in);
        CHECK(std::abs(sum(arm) - 1.0) < 1e-12);
        CHECK(std::abs(arm[2] - 0.5) < 1e-12);
    }
}

TEST_CASE("network construction is checked")
{
    Matrix lossy(2, 2);
    lossy << 1.0, 0.0, 0.0, 0.5;
    ModeNetwork net(3);
    CHECK(kind_of([&] { net.add(CustomElement{lossy, {0, 1}}); }) == ErrorKind::NotUnitary);
    CHECK(kind_of([&] { net.add(BeamSplitter{0, 3, 0.1}); }) == ErrorKind::TargetOutOfRange);
    const int sink = net.add_sink();
    CHECK(sink == 3);
    CHECK(kind_of([&] { net.add(BeamSplitter{0, sink, 0.1}); }) == ErrorKind::InvalidArgument);
    net.add(Block{1, sink});
    CHECK(kind_of([&] { net.add(Block{2, sink}); }) == ErrorKind::InvalidArgument);

    CHECK(kind_of([] { run_network(ModeNetwork(2), StateVector::basis(2, 3)); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { run_network(ModeNetwork(3), single_excitation({1.0, 0.0})); }) ==
          ErrorKind::DimensionMismatch);
}

TEST_CASE("transfer matrices are unitary")
{
    for (std::uint64_t i = 0; i < 50; ++i) {
        const Rule1Networks r = rule1_networks(60, i);
        const Matrix t = r.modified.transfer();
        CHECK((t.adjoint() * t - Matrix::Identity(t.rows(), t.cols())).norm() < 1e-12);
    }
}

TEST_CASE("downstream changes never move the emission probability")
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const Rule1Trial t = rule1_trial(61, i);
        worst = std::max(worst, std::abs(t.emission_base - t.emission_modified));
        CHECK(std::abs(t.total_base - 1.0) < 1e-12);
        CHECK(std::abs(t.total_modified - 1.0) < 1e-12);
        CHECK(t.emission_base > 0.0);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("networks replayed on the qubit register agree")
{
    for (std::uint64_t i = 0; i < 25; ++i) {
        const Rule1Networks r = rule1_networks(62, i);
        for (const ModeNetwork* net : {&r.base, &r.modified}) {
            std::vector<Complex> in = r.input;
            in.resize(static_cast<std::size_t>(net->n_modes()), 0.0);
            const auto want = oracle::network_on_register(*net, in);
            const auto got = run_network(*net, single_excitation(in));
            REQUIRE(got.size() == want.size());
            for (std::size_t m = 0; m < got.size(); ++m) {
                CHECK(std::abs(got[m] - want[m]) < 1e-12);
            }
        }
    }
}

TEST_CASE("a lone antenna shows no phase dependence")
{
    const double ref = antenna_point(0.1, 0.0, 0.0).ratio;
    for (int k = 0; k < 24; ++k) {
        CHECK(std::abs(antenna_point(0.1, 0.0, 2 * pi * k / 24).ratio - ref) < 1e-12);
    }
}

TEST_CASE("antenna probabilities match the path-sum oracle")
{
    for (double e1 : {0.05, 0.1, 0.3}) {
        for (double e2 : {0.0, 0.1, 0.25}) {
            for (double phi : {0.0, 0.7, pi / 2, pi, 4.0}) {
                const AntennaPoint got = antenna_point(e1, e2, phi);
                const oracle::antenna::Point want = oracle::antenna::evaluate(e1, e2, phi);
                CHECK(std::abs(got.p_unconditioned - want.p_unconditioned) < 1e-12);
                CHECK(std::abs(got.p_conditioned - want.p_conditioned) < 1e-12);
                CHECK(std::abs(got.ratio - want.ratio) < 1e-12);
            }
        }
    }
    const AntennaPoint at0 = antenna_point(0.1, 0.1, 0.0);
    CHECK(at0.ratio > 1.0);

    const AntennaPoint none = antenna_point(0.1, 0.1, 0.3, Conditioning::None);
    CHECK(none.ratio == 1.0);
    CHECK(none.p_conditioned == none.p_unconditioned);
}

TEST_CASE("the mirror coupling matches its description")
{
    const oracle::Dense dense = oracle::full_matrix(mirror_coupling().matrix(), mirror_coupling().targets(), 4);
    CHECK((dense - oracle::antenna::mirror()).norm() < 1e-15);
}

TEST_CASE("conditioned enhancement follows cos phi")
{
    double hi = -1.0, lo = 10.0;
    for (int k = 0; k < 360; ++k) {
        const double r = antenna_point(0.1, 0.1, 2 * pi * k / 360).ratio;
        hi = std::max(hi, r);
        lo = std::min(lo, r);
    }
    CHECK(std::abs((hi - lo) - kPinnedPeakToPeak) < 1e-12);
    CHECK(hi == antenna_point(0.1, 0.1, 0.0).ratio);

    // ratio - 1 is even in phi and odd about pi/2 to leading order
    for (double phi : {0.3, 1.0, 2.0}) {
        CHECK(std::abs(antenna_point(0.1, 0.1, phi).ratio - antenna_point(0.1, 0.1, -phi).ratio) < 1e-12);
    }
    const double mid = antenna_point(0.1, 0.1, pi / 2).ratio - 1.0;
    CHECK(std::abs(mid) < 0.1 * (hi - lo));
}

TEST_CASE("second-order scaling in the emission amplitude")
{
    std::vector<double> eps{0.05, 0.1, 0.2};
    std::vector<double> dev;
    for (double e : eps) {
        dev.push_back(std::abs(antenna_point(e, e, 0.0).ratio - 1.0));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double x = std::log(eps[i]), y = std::log(dev[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(eps.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope >= 1.8);
    CHECK(slope <= 2.2);
}

TEST_CASE("phase averaging")
{
    const PhaseAverage c = phase_average([](double) { return 3.5; }, 100, 1);
    CHECK(c.mean == 3.5);
    CHECK(c.std_error == 0.0);

    const PhaseAverage co = phase_average([](double p) { return std::cos(p); }, 10000, 2);
    CHECK(std::abs(co.mean) < 0.03);
    const PhaseAverage c2 = phase_average([](double p) { return std::cos(p) * std::cos(p); }, 10000, 3);
    CHECK(std::abs(c2.mean - 0.5) < 0.021);

    const PhaseAverage again = phase_average([](double p) { return std::cos(p); }, 10000, 2);
    CHECK(again.mean == co.mean);
    CHECK(again.std_error == co.std_error);

    for (std::uint64_t i = 0; i < 100; ++i) {
        const double p = averaging_phase(4, i);
        CHECK(p >= 0.0);
        CHECK(p < 2 * pi);
    }
}

TEST_CASE("averaged enhancement")
{
    AntennaConfig cfg;
    cfg.phase_mode = PhaseMode::Averaged;
    cfg.samples = 10000;
    cfg.seed = 5;
    const AntennaReport r = antenna_experiment(cfg);
    CHECK(std::abs(r.ratio.mean - 1.0) < 1e-3);
    CHECK(r.ratio.samples == 10000);

    const unsigned saved = parallel::thread_count();
    parallel::set_thread_count(1);
    const AntennaReport one = antenna_experiment(cfg);
    parallel::set_thread_count(4);
    const AntennaReport four = antenna_experiment(cfg);
    parallel::set_thread_count(saved);
    CHECK(one.ratio.mean == four.ratio.mean);
    CHECK(one.ratio.std_error == four.ratio.std_error);
}

TEST_CASE("antenna config limits")
{
    AntennaConfig cfg;
    cfg.eps1 = 0.6;
    CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::InvalidArgument);
    cfg.eps1 = 0.1;
    cfg.eps2 = -0.1;
    CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::InvalidArgument);
    cfg.eps2 = 0.1;
    cfg.phase_mode = PhaseMode::Averaged;
    cfg.samples = 1;
    CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::InvalidArgument);
}
