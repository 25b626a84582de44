#include "stiffbench/session_log.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "stiffbench/error.hpp"

namespace stiffbench {

using nlohmann::json;

void SessionLogWriter::write_header(json header) {
    if (header_written_) throw Error("session log header already written");
    header["type"] = "header";
    header["format"] = kSessionLogFormat;
    out_ << header.dump() << '\n';
    header_written_ = true;
}

void SessionLogWriter::append(const json& record) {
    if (!header_written_) throw Error("session log record before header");
    out_ << record.dump() << '\n';
    ++records_;
}

void SessionLogWriter::flush() { out_.flush(); }

namespace {

json finger_json(FingerId f) { return f.to_string(); }

}  // namespace

json message_to_json(const Message& message) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            json j{{"seq", m.seq}, {"tick", m.tick}, {"finger", finger_json(m.finger)}};
            if constexpr (std::is_same_v<T, PoseMessage>) {
                j["type"] = "pose";
                j["dz_leader"] = m.dz_leader;
            } else if constexpr (std::is_same_v<T, ForceMessage>) {
                j["type"] = "force";
                j["z"] = m.reading.z_forces;
                j["f_aggregate"] = m.f_aggregate;
                j["dz_follower"] = m.dz_follower;
            } else {
                j["type"] = "feedback";
                j["method1"] = m.rendered.method1;
                j["method2"] = m.rendered.method2;
                if (m.k_hat) j["k_hat"] = m.k_hat->k_hat;
            }
            return j;
        },
        message);
}

SessionLog read_session_log(std::istream& in) {
    SessionLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw MalformedLog("session log line " + std::to_string(line_no) + " is not a JSON object");
        if (log.header.is_null()) {
            if (j.value("type", "") != "header" || j.value("format", "") != kSessionLogFormat)
                throw MalformedLog("session log does not start with a " + std::string(kSessionLogFormat) + " header");
            log.header = std::move(j);
        } else {
            if (!j.contains("type")) throw MalformedLog("session log line " + std::to_string(line_no) + " has no type");
            log.records.push_back(std::move(j));
        }
    }
    if (log.header.is_null()) throw MalformedLog("empty session log");
    return log;
}

SessionLog read_session_log_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_session_log(in);
}

std::string log_body(std::string_view contents) {
    const auto nl = contents.find('\n');
    if (nl == std::string_view::npos) return {};
    return std::string(contents.substr(nl + 1));
}

}  // namespace stiffbench
