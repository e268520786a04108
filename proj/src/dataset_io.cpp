#include "legodo/dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

#include "legodo/errors.hpp"

namespace legodo {

namespace {

std::string fmt_time(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", t);
    return buf;
}

std::string fmt_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot open for writing: " + path);
    }
    return out;
}

/// Strips a trailing comment and surrounding whitespace; empty result means
/// the line carries no data.
std::string strip(const std::string& line) {
    std::string s = line;
    if (const auto hash = s.find('#'); hash != std::string::npos) {
        s.erase(hash);
    }
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream stream(s);
    while (std::getline(stream, token, delim)) {
        out.push_back(token);
    }
    return out;
}

double parse_number(const std::string& token, const std::string& file,
                    std::size_t line_no) {
    const std::string trimmed = strip(token);
    if (trimmed.empty()) {
        throw ParseError(file, line_no, "empty numeric field");
    }
    char* end = nullptr;
    const double v = std::strtod(trimmed.c_str(), &end);
    if (end != trimmed.c_str() + trimmed.size()) {
        throw ParseError(file, line_no, "not a number: '" + trimmed + "'");
    }
    return v;
}

int parse_leg_index(const std::string& token, const std::string& file,
                    std::size_t line_no) {
    const double v = parse_number(token, file, line_no);
    const int leg = static_cast<int>(v);
    if (v != leg || leg < 0 || leg > 3) {
        throw ParseError(file, line_no, "leg index out of range: '" + token +
                                            "' (expected 0..3)");
    }
    return leg;
}

/// Reads data rows of a comma-separated file, checking the header and field
/// count, and hands each tokenized row to `sink`.
void for_each_csv_row(
    const std::string& path, const std::string& expected_header,
    std::size_t n_fields,
    const std::function<void(const std::vector<std::string>&, std::size_t)>&
        sink) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open: " + path);
    }
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string data = strip(line);
        if (data.empty()) {
            continue;
        }
        if (!header_seen) {
            if (data != expected_header) {
                throw ParseError(path, line_no,
                                 "bad header, expected '" + expected_header +
                                     "'");
            }
            header_seen = true;
            continue;
        }
        const auto tokens = split(data, ',');
        if (tokens.size() != n_fields) {
            throw ParseError(path, line_no,
                             "expected " + std::to_string(n_fields) +
                                 " fields, got " +
                                 std::to_string(tokens.size()));
        }
        sink(tokens, line_no);
    }
    if (!header_seen) {
        throw ParseError(path, line_no == 0 ? 1 : line_no, "missing header");
    }
}

void check_monotone(double prev, double cur, const std::string& file,
                    std::size_t line_no) {
    if (!(cur > prev)) {
        throw ParseError(file, line_no,
                         "non-monotone timestamp: " + fmt_value(prev) +
                             " followed by " + fmt_value(cur));
    }
}

}  // namespace

void write_imu_csv(const std::string& path,
                   const std::vector<ImuSample>& imu) {
    auto out = open_out(path);
    out << "t,ax,ay,az,wx,wy,wz\n";
    for (const auto& s : imu) {
        out << fmt_time(s.t);
        for (int i = 0; i < 3; ++i) {
            out << ',' << fmt_value(s.a_raw[i]);
        }
        for (int i = 0; i < 3; ++i) {
            out << ',' << fmt_value(s.omega_raw[i]);
        }
        out << '\n';
    }
}

void write_legs_csv(const std::string& path,
                    const std::array<std::vector<LegSample>, 4>& legs) {
    auto out = open_out(path);
    out << "t,leg,q1,q2,q3,dq1,dq2,dq3,force\n";
    const std::size_t n = legs[0].size();
    for (const auto& stream : legs) {
        if (stream.size() != n) {
            throw DataError("leg streams have unequal lengths");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (int leg = 0; leg < 4; ++leg) {
            const LegSample& s = legs[static_cast<std::size_t>(leg)][i];
            out << fmt_time(s.t) << ',' << leg;
            for (int k = 0; k < 3; ++k) {
                out << ',' << fmt_value(s.q[k]);
            }
            for (int k = 0; k < 3; ++k) {
                out << ',' << fmt_value(s.dq[k]);
            }
            out << ',' << fmt_value(s.force) << '\n';
        }
    }
}

void write_contacts_csv(
    const std::string& path,
    const std::array<std::vector<ContactTruthSample>, 4>& contacts) {
    auto out = open_out(path);
    out << "t,leg,stance,slipping\n";
    const std::size_t n = contacts[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        for (int leg = 0; leg < 4; ++leg) {
            const auto& c = contacts[static_cast<std::size_t>(leg)][i];
            out << fmt_time(c.t) << ',' << leg << ','
                << (c.phase == ContactPhase::STANCE ? 1 : 0) << ','
                << (c.is_slipping ? 1 : 0) << '\n';
        }
    }
}

std::vector<ImuSample> read_imu_csv(const std::string& path) {
    std::vector<ImuSample> out;
    for_each_csv_row(
        path, "t,ax,ay,az,wx,wy,wz", 7,
        [&](const std::vector<std::string>& f, std::size_t line_no) {
            ImuSample s;
            s.t = parse_number(f[0], path, line_no);
            for (int i = 0; i < 3; ++i) {
                s.a_raw[i] = parse_number(f[1 + i], path, line_no);
                s.omega_raw[i] = parse_number(f[4 + i], path, line_no);
            }
            if (!s.a_raw.allFinite() || !s.omega_raw.allFinite() ||
                !std::isfinite(s.t)) {
                throw ParseError(path, line_no, "non-finite IMU sample");
            }
            if (!out.empty()) {
                check_monotone(out.back().t, s.t, path, line_no);
            }
            out.push_back(s);
        });
    return out;
}

std::vector<LegMeasurement> read_legs_csv(const std::string& path,
                                          std::uint64_t* clamped) {
    std::vector<LegMeasurement> out;
    std::array<double, 4> last_t = {-1e300, -1e300, -1e300, -1e300};
    std::uint64_t clamp_count = 0;
    for_each_csv_row(
        path, "t,leg,q1,q2,q3,dq1,dq2,dq3,force", 9,
        [&](const std::vector<std::string>& f, std::size_t line_no) {
            LegMeasurement m;
            m.t = parse_number(f[0], path, line_no);
            const int leg = parse_leg_index(f[1], path, line_no);
            m.leg_id = static_cast<LegId>(leg);
            for (int i = 0; i < 3; ++i) {
                m.q[i] = parse_number(f[2 + i], path, line_no);
                m.q_dot[i] = parse_number(f[5 + i], path, line_no);
            }
            m.force = parse_number(f[8], path, line_no);
            if (!std::isfinite(m.t) || !m.q.allFinite() ||
                !m.q_dot.allFinite() || !std::isfinite(m.force)) {
                throw ParseError(path, line_no, "non-finite leg record");
            }
            if (m.force < 0.0) {
                m.force = 0.0;
                ++clamp_count;
            }
            check_monotone(last_t[static_cast<std::size_t>(leg)], m.t, path,
                           line_no);
            last_t[static_cast<std::size_t>(leg)] = m.t;
            out.push_back(m);
        });
    if (clamped != nullptr) {
        *clamped = clamp_count;
    }
    return out;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
    auto out = open_out(path);
    out << "# t x y z qw qx qy qz\n";
    for (const auto& pose : traj) {
        Eigen::Quaterniond q(pose.R);
        q.normalize();
        if (q.w() < 0.0) {
            q.coeffs() = -q.coeffs();
        }
        out << fmt_time(pose.t) << ' ' << fmt_value(pose.p.x()) << ' '
            << fmt_value(pose.p.y()) << ' ' << fmt_value(pose.p.z()) << ' '
            << fmt_value(q.w()) << ' ' << fmt_value(q.x()) << ' '
            << fmt_value(q.y()) << ' ' << fmt_value(q.z()) << '\n';
    }
}

Trajectory read_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open: " + path);
    }
    Trajectory traj;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string data = strip(line);
        if (data.empty()) {
            continue;
        }
        std::istringstream fields(data);
        std::vector<std::string> tokens;
        std::string token;
        while (fields >> token) {
            tokens.push_back(token);
        }
        if (tokens.size() != 8) {
            throw ParseError(path, line_no,
                             "expected 8 fields (t x y z qw qx qy qz), got " +
                                 std::to_string(tokens.size()));
        }
        TimedPose pose;
        pose.t = parse_number(tokens[0], path, line_no);
        for (int i = 0; i < 3; ++i) {
            pose.p[i] = parse_number(tokens[1 + i], path, line_no);
        }
        const double qw = parse_number(tokens[4], path, line_no);
        const double qx = parse_number(tokens[5], path, line_no);
        const double qy = parse_number(tokens[6], path, line_no);
        const double qz = parse_number(tokens[7], path, line_no);
        Eigen::Quaterniond q(qw, qx, qy, qz);
        if (std::abs(q.norm() - 1.0) > 1e-6) {
            throw ParseError(path, line_no,
                             "quaternion norm " + fmt_value(q.norm()) +
                                 " deviates from 1 by more than 1e-6");
        }
        q.normalize();
        pose.R = q.toRotationMatrix();
        if (!traj.empty()) {
            check_monotone(traj.back().t, pose.t, path, line_no);
        }
        traj.push_back(pose);
    }
    return traj;
}

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
    nlohmann::json j;
    j["name"] = manifest.name;
    j["sensor_rate"] = manifest.sensor_rate;
    j["imu"] = manifest.imu_path;
    j["legs"] = manifest.legs_path;
    j["gt"] = manifest.gt_path;
    j["contacts"] = manifest.contacts_path;
    j["robot"] = manifest.robot;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path, 1, e.what());
    }
    DatasetManifest m;
    m.name = j.value("name", std::string{});
    m.sensor_rate = j.value("sensor_rate", 500.0);
    m.imu_path = j.value("imu", std::string{});
    m.legs_path = j.value("legs", std::string{});
    m.gt_path = j.value("gt", std::string{});
    m.contacts_path = j.value("contacts", std::string{});
    m.robot = j.value("robot", std::string{"go2"});
    if (!(m.sensor_rate > 0.0)) {
        throw DataError(path + ": sensor_rate must be positive");
    }
    const auto base = std::filesystem::path(path).parent_path();
    for (const std::string& rel : {m.imu_path, m.legs_path}) {
        if (rel.empty() || !std::filesystem::exists(base / rel)) {
            throw DataError(path + ": referenced stream missing: " + rel);
        }
    }
    return m;
}

DatasetReader::DatasetReader(const std::string& imu_path,
                             const std::string& legs_path,
                             double merge_tolerance)
    : tol_(merge_tolerance) {
    imu_ = read_imu_csv(imu_path);
    std::uint64_t clamped = 0;
    for (const LegMeasurement& m : read_legs_csv(legs_path, &clamped)) {
        legs_[static_cast<std::size_t>(m.leg_id)].push_back(m);
    }
    stats_.forces_clamped = clamped;
}

std::optional<SyncedFrame> DatasetReader::next() {
    while (imu_cursor_ < imu_.size()) {
        const ImuSample& imu = imu_[imu_cursor_++];
        SyncedFrame frame;
        frame.t = imu.t;
        frame.imu = imu;
        bool complete = true;
        for (std::size_t leg = 0; leg < 4; ++leg) {
            const auto& stream = legs_[leg];
            std::size_t& cur = cursors_[leg];
            while (cur + 1 < stream.size() &&
                   std::abs(stream[cur + 1].t - imu.t) <=
                       std::abs(stream[cur].t - imu.t)) {
                ++cur;
            }
            if (cur >= stream.size() ||
                std::abs(stream[cur].t - imu.t) > tol_) {
                complete = false;
                break;
            }
            frame.legs[leg] = stream[cur];
        }
        if (!complete) {
            ++stats_.frames_dropped;
            continue;
        }
        ++stats_.frames_emitted;
        return frame;
    }
    return std::nullopt;
}

std::vector<SyncedFrame> read_frames(const std::string& imu_path,
                                     const std::string& legs_path,
                                     MergeStats* stats,
                                     double merge_tolerance) {
    DatasetReader reader(imu_path, legs_path, merge_tolerance);
    std::vector<SyncedFrame> frames;
    while (auto frame = reader.next()) {
        frames.push_back(*frame);
    }
    if (stats != nullptr) {
        *stats = reader.stats();
    }
    return frames;
}

}  // namespace legodo
