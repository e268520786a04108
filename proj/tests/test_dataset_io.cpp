#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "legodo/dataset_io.hpp"
#include "legodo/errors.hpp"
#include "legodo/gait_sim.hpp"
#include "legodo/so3.hpp"

using namespace legodo;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "legodo_io_tests";
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("simulated dataset round trips bit-exact") {
    GaitConfig cfg;
    cfg.duration = 1.0;
    cfg.noise_enabled = true;
    cfg.rng_seed = 7;
    const SimOutput sim = simulate(cfg, default_go2_legs());

    const fs::path dir = scratch_dir();
    write_imu_csv((dir / "imu.csv").string(), sim.imu);
    write_legs_csv((dir / "legs.csv").string(), sim.legs);
    write_contacts_csv((dir / "contacts.csv").string(), sim.contact_truth);
    write_trajectory(sim.ground_truth, (dir / "gt.csv").string());

    const auto imu_back = read_imu_csv((dir / "imu.csv").string());
    REQUIRE(imu_back.size() == sim.imu.size());
    for (std::size_t i = 0; i < imu_back.size(); ++i) {
        CHECK(imu_back[i].a_raw == sim.imu[i].a_raw);
        CHECK(imu_back[i].omega_raw == sim.imu[i].omega_raw);
    }

    MergeStats stats;
    const auto frames = read_frames((dir / "imu.csv").string(),
                                    (dir / "legs.csv").string(), &stats);
    REQUIRE(frames.size() == sim.imu.size());
    CHECK(stats.frames_dropped == 0);
    CHECK(stats.forces_clamped == 0);
    for (std::size_t i = 0; i < frames.size(); i += 23) {
        for (std::size_t leg = 0; leg < 4; ++leg) {
            CHECK(frames[i].legs[leg].q == sim.legs[leg][i].q);
            CHECK(frames[i].legs[leg].q_dot == sim.legs[leg][i].dq);
            CHECK(frames[i].legs[leg].force == sim.legs[leg][i].force);
        }
    }

    const Trajectory gt_back = read_trajectory((dir / "gt.csv").string());
    REQUIRE(gt_back.size() == sim.ground_truth.size());
    for (std::size_t i = 0; i < gt_back.size(); i += 17) {
        CHECK(gt_back[i].p == sim.ground_truth[i].p);
        CHECK((gt_back[i].R - sim.ground_truth[i].R).norm() < 1e-12);
    }
}

TEST_CASE("frames missing a leg are dropped and counted") {
    const fs::path dir = scratch_dir();
    const fs::path imu = dir / "drop_imu.csv";
    const fs::path legs = dir / "drop_legs.csv";
    write_text(imu,
               "t,ax,ay,az,wx,wy,wz\n"
               "0.000000,0,0,9.81,0,0,0\n"
               "0.002000,0,0,9.81,0,0,0\n"
               "0.004000,0,0,9.81,0,0,0\n");
    std::string legs_text = "t,leg,q1,q2,q3,dq1,dq2,dq3,force\n";
    for (const char* t : {"0.000000", "0.002000", "0.004000"}) {
        for (int leg = 0; leg < 4; ++leg) {
            if (std::string(t) == "0.002000" && leg == 2) {
                continue;  // RL missing in the middle frame
            }
            legs_text += std::string(t) + "," + std::to_string(leg) +
                         ",0,0,-1,0,0,0,50\n";
        }
    }
    write_text(legs, legs_text);

    MergeStats stats;
    const auto frames = read_frames(imu.string(), legs.string(), &stats);
    CHECK(frames.size() == 2);
    CHECK(stats.frames_emitted == 2);
    CHECK(stats.frames_dropped == 1);
}

TEST_CASE("negative forces clamp to zero and are counted") {
    const fs::path dir = scratch_dir();
    const fs::path legs = dir / "neg_legs.csv";
    write_text(legs,
               "t,leg,q1,q2,q3,dq1,dq2,dq3,force\n"
               "0.000000,0,0,0,-1,0,0,0,-5\n"
               "0.000000,1,0,0,-1,0,0,0,12\n");
    std::uint64_t clamped = 0;
    const auto records = read_legs_csv(legs.string(), &clamped);
    REQUIRE(records.size() == 2);
    CHECK(records[0].force == 0.0);
    CHECK(records[1].force == 12.0);
    CHECK(clamped == 1);
}

TEST_CASE("non-monotone timestamps are rejected with both values named") {
    const fs::path dir = scratch_dir();
    const fs::path imu = dir / "mono_imu.csv";
    write_text(imu,
               "t,ax,ay,az,wx,wy,wz\n"
               "1.000000,0,0,9.81,0,0,0\n"
               "0.900000,0,0,9.81,0,0,0\n");
    try {
        read_imu_csv(imu.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        const std::string msg = e.what();
        CHECK(msg.find("1") != std::string::npos);
        CHECK(msg.find("0.9") != std::string::npos);
        CHECK(msg.find("mono_imu.csv") != std::string::npos);
    }
}

TEST_CASE("malformed rows carry file and line") {
    const fs::path dir = scratch_dir();

    SUBCASE("wrong header") {
        const fs::path p = dir / "hdr.csv";
        write_text(p, "time,ax,ay,az,wx,wy,wz\n0,0,0,0,0,0,0\n");
        CHECK_THROWS_AS(read_imu_csv(p.string()), ParseError);
    }
    SUBCASE("wrong field count") {
        const fs::path p = dir / "fields.csv";
        write_text(p, "t,ax,ay,az,wx,wy,wz\n0,1,2\n");
        try {
            read_imu_csv(p.string());
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("non-numeric field") {
        const fs::path p = dir / "nan.csv";
        write_text(p, "t,ax,ay,az,wx,wy,wz\n0,zero,0,0,0,0,0\n");
        CHECK_THROWS_AS(read_imu_csv(p.string()), ParseError);
    }
    SUBCASE("leg index out of range") {
        const fs::path p = dir / "leg.csv";
        write_text(p,
                   "t,leg,q1,q2,q3,dq1,dq2,dq3,force\n"
                   "0,7,0,0,0,0,0,0,1\n");
        CHECK_THROWS_AS(read_legs_csv(p.string()), ParseError);
    }
    SUBCASE("empty file") {
        const fs::path p = dir / "empty.csv";
        write_text(p, "");
        CHECK_THROWS_AS(read_imu_csv(p.string()), ParseError);
    }
}

TEST_CASE("identity pose serializes to the canonical line") {
    const fs::path p = scratch_dir() / "identity.txt";
    Trajectory traj;
    traj.push_back({0.0, Vec3::Zero(), Rot3::Identity()});
    write_trajectory(traj, p.string());
    const std::string text = read_text(p);
    CHECK(text == "# t x y z qw qx qy qz\n0.000000 0 0 0 1 0 0 0\n");
}

TEST_CASE("trajectory round trip over random poses") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    Trajectory traj;
    for (int i = 0; i < 1000; ++i) {
        TimedPose pose;
        pose.t = 0.002 * i;
        pose.p = Vec3(gauss(rng), gauss(rng), gauss(rng)) * 10.0;
        const Vec3 axis =
            Vec3(gauss(rng), gauss(rng), gauss(rng)).normalized();
        pose.R = exp_map(axis * angle(rng));
        traj.push_back(pose);
    }
    const fs::path p = scratch_dir() / "random.txt";
    write_trajectory(traj, p.string());
    const Trajectory back = read_trajectory(p.string());
    REQUIRE(back.size() == traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(back[i].p == traj[i].p);
        CHECK((back[i].R - traj[i].R).norm() < 1e-12);
    }
}

TEST_CASE("trajectory reader ignores comments and blanks") {
    const fs::path p = scratch_dir() / "comments.txt";
    write_text(p,
               "# header comment\n"
               "\n"
               "0.000000 1 2 3 1 0 0 0  # inline comment\n"
               "   \n"
               "0.002000 4 5 6 1 0 0 0\n");
    const Trajectory traj = read_trajectory(p.string());
    REQUIRE(traj.size() == 2);
    CHECK(traj[0].p == Vec3(1.0, 2.0, 3.0));
    CHECK(traj[1].p == Vec3(4.0, 5.0, 6.0));
}

TEST_CASE("non-unit quaternions are rejected") {
    const fs::path p = scratch_dir() / "badq.txt";
    write_text(p, "0.000000 0 0 0 1.1 0 0 0\n");
    CHECK_THROWS_AS(read_trajectory(p.string()), ParseError);
}

TEST_CASE("manifest round trip and validation") {
    const fs::path dir = scratch_dir() / "manifest_case";
    fs::create_directories(dir);
    write_text(dir / "imu.csv", "t,ax,ay,az,wx,wy,wz\n");
    write_text(dir / "legs.csv", "t,leg,q1,q2,q3,dq1,dq2,dq3,force\n");

    DatasetManifest m;
    m.name = "unit";
    m.sensor_rate = 500.0;
    m.imu_path = "imu.csv";
    m.legs_path = "legs.csv";
    write_manifest(m, (dir / "manifest.json").string());
    const DatasetManifest back = load_manifest((dir / "manifest.json").string());
    CHECK(back.name == "unit");
    CHECK(back.sensor_rate == 500.0);
    CHECK(back.imu_path == "imu.csv");

    fs::remove(dir / "legs.csv");
    CHECK_THROWS_AS(load_manifest((dir / "manifest.json").string()),
                    DataError);
}
