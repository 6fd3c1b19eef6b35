#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

#include "probekit/errors.hpp"

namespace probekit {

// Classic pcap only. Global header is 24 bytes, each record header 16.
inline constexpr std::size_t kPcapGlobalHeaderSize = 24;
inline constexpr std::size_t kPcapRecordHeaderSize = 16;

enum class LinkType : std::uint32_t {
    Ieee80211 = 105,  // raw 802.11 frames
    Radiotap = 127,   // radiotap pseudo-header + 802.11 frame
};

enum class TimestampResolution { Micro, Nano };
enum class ByteOrder { Little, Big };

// Whole seconds plus nanoseconds. Microsecond captures are widened on read
// (usec * 1000) and narrowed on write, so a capture re-written with its own
// meta round-trips bit-exactly.
struct Timestamp {
    std::uint32_t sec = 0;
    std::uint32_t nsec = 0;

    double seconds() const { return static_cast<double>(sec) + nsec * 1e-9; }
    auto operator<=>(const Timestamp&) const = default;
};

inline double ts_diff(const Timestamp& a, const Timestamp& b) {
    return (static_cast<double>(a.sec) - static_cast<double>(b.sec)) +
           (static_cast<double>(a.nsec) - static_cast<double>(b.nsec)) * 1e-9;
}

struct CaptureRecord {
    Timestamp ts;
    std::uint32_t original_length = 0;
    std::vector<std::uint8_t> payload;

    std::uint32_t captured_length() const { return static_cast<std::uint32_t>(payload.size()); }

    bool operator==(const CaptureRecord&) const = default;
};

struct CaptureMeta {
    LinkType link_type = LinkType::Ieee80211;
    TimestampResolution resolution = TimestampResolution::Micro;
    ByteOrder byte_order = ByteOrder::Little;
    std::uint32_t snap_length = 65535;

    bool operator==(const CaptureMeta&) const = default;
};

// Streaming reader. Yields complete records in file order; a file that ends
// mid-record is reported through truncated() after the stream runs dry, with
// all complete records already delivered.
class PcapReader {
public:
    explicit PcapReader(const std::filesystem::path& path);

    const CaptureMeta& meta() const { return meta_; }
    std::optional<CaptureRecord> next();
    bool truncated() const { return truncated_; }
    std::size_t records_read() const { return records_read_; }

private:
    std::ifstream in_;
    std::filesystem::path path_;
    CaptureMeta meta_;
    std::uint64_t remaining_ = 0;  // payload bytes left in the file
    std::size_t records_read_ = 0;
    bool truncated_ = false;
    bool done_ = false;
};

struct Capture {
    CaptureMeta meta;
    std::vector<CaptureRecord> records;
    bool truncated = false;
};

Capture read_capture(const std::filesystem::path& path);

class PcapWriter {
public:
    PcapWriter(const std::filesystem::path& path, const CaptureMeta& meta);
    ~PcapWriter();
    PcapWriter(const PcapWriter&) = delete;
    PcapWriter& operator=(const PcapWriter&) = delete;

    void append(const CaptureRecord& record);
    std::uint64_t bytes_written() const { return bytes_written_; }
    std::size_t records_written() const { return records_written_; }
    void close();

private:
    std::ofstream out_;
    std::filesystem::path path_;
    CaptureMeta meta_;
    std::uint64_t bytes_written_ = 0;
    std::size_t records_written_ = 0;
};

// Returns the total byte count written (24-byte header plus 16 + length per record).
std::uint64_t write_capture(const std::filesystem::path& path, const CaptureMeta& meta,
                            std::span<const CaptureRecord> records);

// Rotation mirrors a periodic capture saver: the record-count trigger splits
// on volume, the interval trigger closes one file per elapsed time window
// (windows with no records still produce a valid header-only file).
struct RotationPolicy {
    std::optional<std::size_t> max_records;
    std::optional<double> max_interval_seconds;
};

class RotatingPcapWriter {
public:
    RotatingPcapWriter(const std::filesystem::path& base_path, const CaptureMeta& meta,
                       const RotationPolicy& policy);

    void append(const CaptureRecord& record);
    void rotate();
    const std::vector<std::filesystem::path>& files() const { return files_; }
    std::size_t records_written() const { return records_written_; }
    void close();

private:
    void open_next();

    std::filesystem::path base_path_;
    CaptureMeta meta_;
    RotationPolicy policy_;
    std::optional<PcapWriter> writer_;
    std::vector<std::filesystem::path> files_;
    std::size_t file_index_ = 0;
    std::size_t records_written_ = 0;
    std::optional<double> window_start_;
};

// Drops a leading radiotap header using its little-endian length field;
// identity for plain 802.11 captures. The view aliases the record payload.
std::span<const std::uint8_t> strip_radiotap(const CaptureRecord& record, const CaptureMeta& meta);

}  // namespace probekit
