#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stiffbench/protocol.hpp"

namespace stiffbench {

inline constexpr std::string_view kSessionLogFormat = "stiffbench-session/1";

/// Parsed session log: the header line and every record after it.
struct SessionLog {
    nlohmann::json header;
    std::vector<nlohmann::json> records;
};

/// Line-delimited JSON writer. The first line is the header; every later
/// line is one record. Nothing time-of-day dependent is ever written.
class SessionLogWriter {
public:
    explicit SessionLogWriter(std::ostream& out) : out_(out) {}

    void write_header(nlohmann::json header);
    void append(const nlohmann::json& record);
    void flush();

    [[nodiscard]] std::size_t records() const { return records_; }

private:
    std::ostream& out_;
    bool header_written_ = false;
    std::size_t records_ = 0;
};

nlohmann::json message_to_json(const Message& message);

/// Throws Error when a line is not JSON or the header is missing/foreign.
SessionLog read_session_log(std::istream& in);
SessionLog read_session_log_file(const std::filesystem::path& path);

/// Everything after the header line.
std::string log_body(std::string_view contents);

}  // namespace stiffbench
