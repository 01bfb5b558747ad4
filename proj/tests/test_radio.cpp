#include <doctest.h>

#include <cmath>
#include <vector>

#include "uwsim/medium.hpp"
#include "uwsim/radio.hpp"

using namespace uwsim;

TEST_SUITE_BEGIN("radio");

TEST_CASE("snr with and without interference") {
    CHECK(snr_db(-90.0, -108.0, 0.0) == doctest::Approx(18.0).epsilon(1e-12));
    // Interference equal to the floor power doubles the noise: -3.01 dB.
    const double floor_mw = std::pow(10.0, -108.0 / 10.0);
    CHECK(snr_db(-90.0, -108.0, floor_mw) == doctest::Approx(15.0).epsilon(0.02 / 15.0));
    CHECK(snr_db(-108.0, -108.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fsk ber limits and closed forms") {
    RadioParams p = paper_radio();

    SUBCASE("no-information limit") {
        p.receiver = ReceiverType::noncoherent;
        CHECK(fsk_ber(-200.0, p) == doctest::Approx(0.5).epsilon(1e-9));
        p.receiver = ReceiverType::coherent;
        CHECK(fsk_ber(-200.0, p) == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("noncoherent at Eb/N0 = 2") {
        // noise_bw/data_rate = 4, so Eb/N0 = 2 corresponds to snr = 0.5.
        p.receiver = ReceiverType::noncoherent;
        const double snr = 10.0 * std::log10(0.5);
        CHECK(fsk_ber(snr, p) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
    }
    SUBCASE("coherent at Eb/N0 = 4 equals Q(2)") {
        p.receiver = ReceiverType::coherent;
        const double snr = 10.0 * std::log10(1.0);
        const double q2 = 0.5 * std::erfc(2.0 / std::sqrt(2.0));  // standard-normal tail
        CHECK(fsk_ber(snr, p) == doctest::Approx(q2).epsilon(1e-12));
        CHECK(q2 == doctest::Approx(0.02275).epsilon(1e-3));
    }
    SUBCASE("high snr saturates to zero") {
        CHECK(fsk_ber(60.0, p) == 0.0);
    }
}

TEST_CASE("fsk ber is monotone and coherent never loses to noncoherent") {
    RadioParams coh = paper_radio();
    coh.receiver = ReceiverType::coherent;
    RadioParams nonc = coh;
    nonc.receiver = ReceiverType::noncoherent;
    double prev_c = 1.0, prev_n = 1.0;
    for (double snr = -30.0; snr <= 30.0; snr += 0.5) {
        const double c = fsk_ber(snr, coh);
        const double n = fsk_ber(snr, nonc);
        CHECK(c <= prev_c + 1e-15);
        CHECK(n <= prev_n + 1e-15);
        CHECK(c <= n + 1e-15);
        prev_c = c;
        prev_n = n;
    }
}

TEST_CASE("coded ber bound") {
    const CodeSpec code = conv_3_1_2_code();
    CHECK(code.d_free == 7);
    CHECK(code.b_dfree == 1);

    CHECK(coded_ber(0.0, code) == 0.0);
    CHECK(coded_ber(0.5, code) == doctest::Approx(0.5).epsilon(1e-12));  // bound 1, clamped

    const double oracle = std::pow(2.0 * std::sqrt(0.01 * 0.99), 7.0);
    CHECK(coded_ber(0.01, code) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(coded_ber(0.01, code) > 1.2e-5);
    CHECK(coded_ber(0.01, code) < 1.3e-5);

    CHECK_THROWS_AS(coded_ber(1.5, code), std::domain_error);
    CHECK_THROWS_AS(coded_ber(-0.1, code), std::domain_error);

    // Never worse than the raw channel; monotone over [0, 1/2].
    double prev = -1.0;
    for (double p = 0.0; p <= 0.5; p += 0.002) {
        const double c = coded_ber(p, code);
        CHECK(c <= p + 1e-15);
        CHECK(c >= prev - 1e-15);
        prev = c;
    }
}

TEST_CASE("frame success probability") {
    CHECK(frame_success_probability(0.0, 240) == 1.0);
    const double oracle = std::exp(240.0 * std::log1p(-1e-3));
    CHECK(frame_success_probability(1e-3, 240) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == doctest::Approx(0.7866).epsilon(1e-3));
    CHECK(frame_success_probability(0.5, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(frame_success_probability(1.0, 10) == 0.0);
    CHECK_THROWS_AS(frame_success_probability(0.1, 0), std::domain_error);
    CHECK_THROWS_AS(frame_success_probability(1.1, 8), std::domain_error);

    // Non-increasing in both arguments.
    CHECK(frame_success_probability(1e-3, 240) >= frame_success_probability(2e-3, 240));
    CHECK(frame_success_probability(1e-3, 240) >= frame_success_probability(1e-3, 480));
}

TEST_CASE("airtime of a 30+9 byte frame at 3 kbps is 104 ms") {
    Frame f;
    f.payload_len = 30;
    f.header_len = 9;
    CHECK(f.airtime_s(3000.0) == doctest::Approx(0.104).epsilon(1e-12));
}

namespace {

struct MediumHarness {
    Engine engine;
    Medium medium;
    std::vector<std::pair<NodeId, Frame>> delivered;
    std::vector<std::tuple<NodeId, RxOutcome, double>> outcomes;

    MediumHarness(std::vector<Position> pos, RadioParams radio,
                  FadingModel fading = {FadingModel::Kind::none, 0.0},
                  PathLossModel channel = paper_linear_model())
        : medium(engine, channel, fading, radio, std::move(pos), 42, 0) {
        for (std::size_t i = 0; i < medium.node_count(); ++i) {
            engine.set_clock(static_cast<NodeId>(i), NodeClock{});
        }
        medium.set_deliver_handler(
            [this](NodeId rx, const Frame& f) { delivered.emplace_back(rx, f); });
        medium.set_outcome_handler([this](NodeId rx, const Frame&, RxOutcome out, double rx_dbm) {
            outcomes.emplace_back(rx, out, rx_dbm);
        });
    }
};

Frame data_frame(int payload) {
    Frame f;
    f.kind = FrameKind::data;
    f.payload_len = payload;
    f.header_len = 9;
    return f;
}

}  // namespace

TEST_CASE("solo frame at high snr is delivered at start + airtime") {
    // 2 m at 30 dBm: rx = 30 - 68.3 = -38.3 dBm, snr ~70 dB.
    MediumHarness h({{0, 0}, {2, 0}}, paper_radio(30.0));
    Frame f = data_frame(30);
    f.origin = 0;
    CHECK(h.medium.begin_transmission(0, f));
    h.engine.run_until(1.0);
    REQUIRE(h.delivered.size() == 1);
    CHECK(h.delivered[0].first == 1);
    REQUIRE(h.outcomes.size() == 1);
    CHECK(std::get<1>(h.outcomes[0]) == RxOutcome::delivered);
}

TEST_CASE("a second begin_transmission while busy is a busy error") {
    MediumHarness h({{0, 0}, {2, 0}}, paper_radio(30.0));
    Frame f = data_frame(30);
    f.origin = 0;
    CHECK(h.medium.begin_transmission(0, f));
    CHECK_FALSE(h.medium.begin_transmission(0, f));
    CHECK(h.medium.mode(0) == RadioMode::transmitting);
    h.engine.run_until(1.0);
    CHECK(h.medium.mode(0) == RadioMode::idle);
}

TEST_CASE("rx power below sensitivity never enters reception") {
    // 10 m at 30 dBm: rx = 30 - 151.9 = -121.9 dBm < -101 dBm.
    MediumHarness h({{0, 0}, {10, 0}}, paper_radio(30.0));
    Frame f = data_frame(30);
    f.origin = 0;
    h.medium.begin_transmission(0, f);
    h.engine.run_until(1.0);
    CHECK(h.delivered.empty());
    REQUIRE(h.outcomes.size() == 1);
    CHECK(std::get<1>(h.outcomes[0]) == RxOutcome::below_sensitivity);
    CHECK(std::get<2>(h.outcomes[0]) < paper_radio().sensitivity_dbm);
}

TEST_CASE("a receiver busy transmitting loses the frame regardless of power") {
    MediumHarness h({{0, 0}, {2, 0}}, paper_radio(30.0));
    Frame big = data_frame(300);  // 824 ms airtime
    big.origin = 1;
    h.medium.begin_transmission(1, big);
    h.engine.run_until(0.1);
    Frame f = data_frame(30);
    f.origin = 0;
    h.medium.begin_transmission(0, f);  // arrives fully inside node 1's tx
    h.engine.run_until(2.0);
    bool saw_collision_at_1 = false;
    for (const auto& [rx, out, dbm] : h.outcomes) {
        if (rx == 1) {
            CHECK(out == RxOutcome::lost_collision);
            saw_collision_at_1 = true;
        }
    }
    CHECK(saw_collision_at_1);
    // Node 0 itself was transmitting when node 1's frame kept arriving.
    CHECK(h.delivered.empty());
}

TEST_CASE("self-deafness also applies when the receiver starts mid-arrival") {
    MediumHarness h({{0, 0}, {2, 0}}, paper_radio(30.0));
    Frame f = data_frame(300);  // long frame toward node 1
    f.origin = 0;
    h.medium.begin_transmission(0, f);
    h.engine.run_until(0.2);
    Frame mine = data_frame(10);
    mine.origin = 1;
    h.medium.begin_transmission(1, mine);  // node 1 transmits mid-arrival
    h.engine.run_until(2.0);
    bool node1_lost = false;
    for (const auto& [rx, out, dbm] : h.outcomes) {
        if (rx == 1 && out == RxOutcome::lost_collision) node1_lost = true;
    }
    CHECK(node1_lost);
}

TEST_CASE("two equal-power overlapping frames collide at a third receiver") {
    // Receiver node 2 sits exactly between two transmitters. With the
    // bandwidth factor neutralized (noise_bw == data_rate) and no coding,
    // SIR 0 dB gives p = Q(1) ~ 0.159 and 240-bit success ~ 9e-19.
    RadioParams radio = paper_radio(30.0);
    radio.noise_bw_hz = radio.data_rate_bps;
    radio.coding = CodingType::none;
    radio.receiver = ReceiverType::coherent;
    MediumHarness h({{0, 0}, {8, 0}, {4, 0}}, radio);

    Frame a = data_frame(21);  // 240 bits
    a.origin = 0;
    Frame b = data_frame(21);
    b.origin = 1;
    h.medium.begin_transmission(0, a);
    h.medium.begin_transmission(1, b);
    CHECK(h.medium.current_interference_mw(2) > 0.0);
    h.engine.run_until(1.0);

    int collisions_at_2 = 0;
    for (const auto& [rx, out, dbm] : h.outcomes) {
        if (rx == 2) {
            CHECK(out == RxOutcome::lost_collision);
            ++collisions_at_2;
        }
    }
    CHECK(collisions_at_2 == 2);
    CHECK(h.delivered.empty());
}

TEST_CASE("interference uses the worst-case overlap window") {
    // The interferer overlaps only the tail of the frame; the decision must
    // still fail, because the worst-case window governs the whole frame.
    RadioParams radio = paper_radio(30.0);
    radio.noise_bw_hz = radio.data_rate_bps;
    radio.coding = CodingType::none;
    radio.receiver = ReceiverType::coherent;
    MediumHarness h({{0, 0}, {8, 0}, {4, 0}}, radio);

    Frame a = data_frame(300);  // 824 ms
    a.origin = 0;
    h.medium.begin_transmission(0, a);
    h.engine.run_until(0.5);
    Frame b = data_frame(21);  // lands inside a's airtime
    b.origin = 1;
    h.medium.begin_transmission(1, b);
    h.engine.run_until(2.0);

    bool frame_a_collided = false;
    for (const auto& [rx, out, dbm] : h.outcomes) {
        if (rx == 2 && out == RxOutcome::lost_collision) frame_a_collided = true;
    }
    CHECK(frame_a_collided);
}

TEST_CASE("back-to-back frames do not interfere across the shared boundary") {
    MediumHarness h({{0, 0}, {2, 0}}, paper_radio(30.0));
    Frame f = data_frame(30);
    f.origin = 0;
    const double airtime = f.airtime_s(3000.0);
    h.medium.begin_transmission(0, f);
    h.engine.schedule(airtime, [&] {
        Frame g = data_frame(30);
        g.origin = 0;
        CHECK(h.medium.begin_transmission(0, g));
    });
    h.engine.run_until(1.0);
    REQUIRE(h.delivered.size() == 2);
    for (const auto& [rx, out, dbm] : h.outcomes) CHECK(out == RxOutcome::delivered);
}

TEST_CASE("radio params validation") {
    RadioParams p = paper_radio();
    CHECK_NOTHROW(p.validate());
    p.tx_power_dbm = 31.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = paper_radio();
    p.sensitivity_dbm = -120.0;  // below the noise floor
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = paper_radio();
    p.data_rate_bps = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_SUITE_END();
