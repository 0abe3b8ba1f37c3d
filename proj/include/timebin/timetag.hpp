#ifndef TIMEBIN_TIMETAG_HPP
#define TIMEBIN_TIMETAG_HPP

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "errors.hpp"
#include "phase.hpp"

namespace timebin {

/// Only the "+" output port of each interferometer carries a detector.
enum class Channel : std::uint8_t { alice_plus = 0, bob_plus = 1 };

inline std::string to_string(Channel c) { return c == Channel::alice_plus ? "alice_plus" : "bob_plus"; }

struct TimetagRecord {
    Channel channel = Channel::alice_plus;
    std::uint64_t tick = 0; ///< TDC ticks since run start

    friend bool operator==(const TimetagRecord&, const TimetagRecord&) = default;
};

/// Run metadata carried in front of every record stream.
struct StreamHeader {
    ExperimentConfig config;
    std::string label;
    Phase alice_phase;
    Phase bob_phase;
    double duration = 0.0;
    std::uint64_t run_index = 0;
    double start_time = 0.0;
    std::string model_id;
    std::uint64_t generated_pairs = 0;
    double alice_phase_offset = 0.0; ///< realized jitter
    double bob_phase_offset = 0.0;
};

struct TimetagStream {
    StreamHeader header;
    std::vector<TimetagRecord> records;

    std::size_t count(Channel c) const noexcept
    {
        std::size_t n = 0;
        for (const auto& r : records) n += r.channel == c;
        return n;
    }
};

inline nlohmann::json to_json(const StreamHeader& h)
{
    return {
        {"config", to_json(h.config)},
        {"label", h.label},
        {"alice_phase", h.alice_phase.value()},
        {"bob_phase", h.bob_phase.value()},
        {"duration", h.duration},
        {"run_index", h.run_index},
        {"start_time", h.start_time},
        {"model_id", h.model_id},
        {"generated_pairs", h.generated_pairs},
        {"alice_phase_offset", h.alice_phase_offset},
        {"bob_phase_offset", h.bob_phase_offset},
    };
}

inline StreamHeader stream_header_from_json(const nlohmann::json& j)
{
    try {
        StreamHeader h;
        h.config = experiment_config_from_json(j.at("config"));
        h.label = j.at("label").get<std::string>();
        h.alice_phase = Phase(j.at("alice_phase").get<double>());
        h.bob_phase = Phase(j.at("bob_phase").get<double>());
        h.duration = j.at("duration").get<double>();
        h.run_index = j.value("run_index", std::uint64_t{0});
        h.start_time = j.value("start_time", 0.0);
        h.model_id = j.value("model_id", std::string{});
        h.generated_pairs = j.value("generated_pairs", std::uint64_t{0});
        h.alice_phase_offset = j.value("alice_phase_offset", 0.0);
        h.bob_phase_offset = j.value("bob_phase_offset", 0.0);
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("bad stream header: ") + e.what());
    } catch (const invalid_argument& e) {
        throw data_error(std::string("bad stream header: ") + e.what());
    }
}

// TTB1 binary layout, all integers little-endian:
//   "TTB1" | u32 header length | header JSON | records of {u8 channel, u64 tick} to EOF

inline constexpr std::array<char, 4> ttb1_magic{'T', 'T', 'B', '1'};
inline constexpr std::size_t ttb1_record_size = 9;

namespace detail {

template <typename T>
void put_le(std::ostream& os, T v)
{
    char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(buf, sizeof(T));
}

template <typename T>
T get_le(const unsigned char* p) noexcept
{
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

} // namespace detail

inline void write_ttb1(std::ostream& os, const TimetagStream& s)
{
    const std::string header = to_json(s.header).dump();
    os.write(ttb1_magic.data(), ttb1_magic.size());
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(header.size()));
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::string block;
    block.resize(s.records.size() * ttb1_record_size);
    auto* out = reinterpret_cast<unsigned char*>(block.data());
    for (const auto& r : s.records) {
        *out++ = static_cast<unsigned char>(r.channel);
        for (int i = 0; i < 8; ++i) *out++ = static_cast<unsigned char>((r.tick >> (8 * i)) & 0xff);
    }
    os.write(block.data(), static_cast<std::streamsize>(block.size()));
    if (!os) throw data_error("failed writing TTB1 stream");
}

inline TimetagStream read_ttb1(std::istream& is)
{
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), 4) || magic != ttb1_magic) throw data_error("not a TTB1 stream (bad magic)");
    unsigned char len_buf[4];
    if (!is.read(reinterpret_cast<char*>(len_buf), 4)) throw data_error("truncated TTB1 header length");
    const auto len = detail::get_le<std::uint32_t>(len_buf);
    std::string header(len, '\0');
    if (!is.read(header.data(), len)) throw data_error("truncated TTB1 header");

    TimetagStream s;
    try {
        s.header = stream_header_from_json(nlohmann::json::parse(header));
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("TTB1 header is not valid JSON: ") + e.what());
    }

    std::string body((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (body.size() % ttb1_record_size != 0) throw data_error("truncated TTB1 record at end of stream");
    const auto* p = reinterpret_cast<const unsigned char*>(body.data());
    s.records.reserve(body.size() / ttb1_record_size);
    std::uint64_t last = 0;
    for (std::size_t off = 0; off < body.size(); off += ttb1_record_size) {
        if (p[off] > 1) throw data_error("unknown TTB1 channel " + std::to_string(p[off]));
        TimetagRecord r{static_cast<Channel>(p[off]), detail::get_le<std::uint64_t>(p + off + 1)};
        if (r.tick < last) throw data_error("TTB1 ticks are not monotonically nondecreasing");
        last = r.tick;
        s.records.push_back(r);
    }
    return s;
}

inline void save_ttb1(const std::string& path, const TimetagStream& s)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open " + path + " for writing");
    write_ttb1(os, s);
}

inline TimetagStream load_ttb1(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open " + path);
    return read_ttb1(is);
}

/// CSV form: "# <header JSON>" line, "channel,tick" line, one record per line.
inline void write_csv(std::ostream& os, const TimetagStream& s)
{
    os << "# " << to_json(s.header).dump() << "\nchannel,tick\n";
    for (const auto& r : s.records) os << static_cast<int>(r.channel) << ',' << r.tick << '\n';
}

inline TimetagStream read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw data_error("CSV stream lacks '# header' line");
    TimetagStream s;
    try {
        s.header = stream_header_from_json(nlohmann::json::parse(line.substr(2)));
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("CSV header is not valid JSON: ") + e.what());
    }
    if (!std::getline(is, line) || line != "channel,tick") throw data_error("CSV stream lacks column header");
    std::uint64_t last = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw data_error("bad CSV record: " + line);
        const std::string ch = line.substr(0, comma);
        TimetagRecord r;
        if (ch == "0" || ch == "alice_plus") r.channel = Channel::alice_plus;
        else if (ch == "1" || ch == "bob_plus") r.channel = Channel::bob_plus;
        else throw data_error("unknown CSV channel: " + ch);
        try {
            std::size_t used = 0;
            const std::string tick = line.substr(comma + 1);
            r.tick = std::stoull(tick, &used);
            if (used != tick.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw data_error("bad CSV tick: " + line);
        }
        if (r.tick < last) throw data_error("CSV ticks are not monotonically nondecreasing");
        last = r.tick;
        s.records.push_back(r);
    }
    return s;
}

/// Loads TTB1 or CSV, chosen by the leading magic bytes.
inline TimetagStream load_stream(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open " + path);
    char first[4]{};
    is.read(first, 4);
    is.clear();
    is.seekg(0);
    if (std::string(first, 4) == "TTB1") return read_ttb1(is);
    return read_csv(is);
}

} // namespace timebin

#endif // TIMEBIN_TIMETAG_HPP
