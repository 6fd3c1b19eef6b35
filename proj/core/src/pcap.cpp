#include "probekit/pcap.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>

namespace probekit {

namespace {

// Magics as they read when decoded little-endian. A byte-swapped value means
// the file was written on the opposite byte order.
constexpr std::uint32_t kMagicMicroLe = 0xa1b2c3d4;
constexpr std::uint32_t kMagicMicroBe = 0xd4c3b2a1;
constexpr std::uint32_t kMagicNanoLe = 0xa1b23c4d;
constexpr std::uint32_t kMagicNanoBe = 0x4d3cb2a1;

std::uint32_t read_u32(const std::uint8_t* p, ByteOrder order) {
    if (order == ByteOrder::Little) {
        return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
               static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
    }
    return static_cast<std::uint32_t>(p[3]) | static_cast<std::uint32_t>(p[2]) << 8 |
           static_cast<std::uint32_t>(p[1]) << 16 | static_cast<std::uint32_t>(p[0]) << 24;
}

void put_u16(std::uint8_t* p, std::uint16_t v, ByteOrder order) {
    if (order == ByteOrder::Little) {
        p[0] = static_cast<std::uint8_t>(v);
        p[1] = static_cast<std::uint8_t>(v >> 8);
    } else {
        p[0] = static_cast<std::uint8_t>(v >> 8);
        p[1] = static_cast<std::uint8_t>(v);
    }
}

void put_u32(std::uint8_t* p, std::uint32_t v, ByteOrder order) {
    if (order == ByteOrder::Little) {
        p[0] = static_cast<std::uint8_t>(v);
        p[1] = static_cast<std::uint8_t>(v >> 8);
        p[2] = static_cast<std::uint8_t>(v >> 16);
        p[3] = static_cast<std::uint8_t>(v >> 24);
    } else {
        p[0] = static_cast<std::uint8_t>(v >> 24);
        p[1] = static_cast<std::uint8_t>(v >> 16);
        p[2] = static_cast<std::uint8_t>(v >> 8);
        p[3] = static_cast<std::uint8_t>(v);
    }
}

std::uint32_t magic_for(const CaptureMeta& meta) {
    // The value below is what the bytes decode to in the file's own order.
    return meta.resolution == TimestampResolution::Micro ? kMagicMicroLe : kMagicNanoLe;
}

}  // namespace

PcapReader::PcapReader(const std::filesystem::path& path) : path_(path) {
    std::error_code ec;
    const auto file_size = std::filesystem::file_size(path, ec);
    in_.open(path, std::ios::binary);
    if (!in_ || ec) {
        throw IoError("cannot open " + path.string());
    }

    std::array<std::uint8_t, kPcapGlobalHeaderSize> header{};
    in_.read(reinterpret_cast<char*>(header.data()), header.size());
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got < 4) {
        throw UnsupportedFormatError(path.string() + ": too short to contain a pcap magic");
    }

    const std::uint32_t magic_le = read_u32(header.data(), ByteOrder::Little);
    switch (magic_le) {
        case kMagicMicroLe:
            meta_.byte_order = ByteOrder::Little;
            meta_.resolution = TimestampResolution::Micro;
            break;
        case kMagicNanoLe:
            meta_.byte_order = ByteOrder::Little;
            meta_.resolution = TimestampResolution::Nano;
            break;
        case kMagicMicroBe:
            meta_.byte_order = ByteOrder::Big;
            meta_.resolution = TimestampResolution::Micro;
            break;
        case kMagicNanoBe:
            meta_.byte_order = ByteOrder::Big;
            meta_.resolution = TimestampResolution::Nano;
            break;
        default: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "unknown pcap magic 0x%08x", magic_le);
            throw UnsupportedFormatError(path.string() + ": " + buf);
        }
    }
    if (got < kPcapGlobalHeaderSize) {
        throw TruncationError(path.string() + ": truncated pcap global header", 0);
    }

    meta_.snap_length = read_u32(header.data() + 16, meta_.byte_order);
    const std::uint32_t network = read_u32(header.data() + 20, meta_.byte_order);
    if (network == static_cast<std::uint32_t>(LinkType::Ieee80211)) {
        meta_.link_type = LinkType::Ieee80211;
    } else if (network == static_cast<std::uint32_t>(LinkType::Radiotap)) {
        meta_.link_type = LinkType::Radiotap;
    } else {
        throw UnsupportedFormatError(path_.string() + ": unsupported link type " +
                                     std::to_string(network));
    }

    remaining_ = file_size > kPcapGlobalHeaderSize ? file_size - kPcapGlobalHeaderSize : 0;
}

std::optional<CaptureRecord> PcapReader::next() {
    if (done_) return std::nullopt;

    std::array<std::uint8_t, kPcapRecordHeaderSize> header{};
    in_.read(reinterpret_cast<char*>(header.data()), header.size());
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got == 0) {
        done_ = true;  // clean EOF
        return std::nullopt;
    }
    if (got < kPcapRecordHeaderSize) {
        done_ = true;
        truncated_ = true;
        return std::nullopt;
    }
    remaining_ -= kPcapRecordHeaderSize;

    CaptureRecord record;
    record.ts.sec = read_u32(header.data(), meta_.byte_order);
    const std::uint32_t frac = read_u32(header.data() + 4, meta_.byte_order);
    record.ts.nsec = meta_.resolution == TimestampResolution::Micro
                         ? static_cast<std::uint32_t>(std::uint64_t{frac} * 1000)
                         : frac;
    const std::uint32_t incl_len = read_u32(header.data() + 8, meta_.byte_order);
    record.original_length = read_u32(header.data() + 12, meta_.byte_order);

    // A length field pointing past the end of the file is a cut-off record,
    // not something to allocate for.
    if (incl_len > remaining_) {
        done_ = true;
        truncated_ = true;
        return std::nullopt;
    }
    record.payload.resize(incl_len);
    in_.read(reinterpret_cast<char*>(record.payload.data()), incl_len);
    if (static_cast<std::uint32_t>(in_.gcount()) < incl_len) {
        done_ = true;
        truncated_ = true;
        return std::nullopt;
    }
    remaining_ -= incl_len;
    ++records_read_;
    return record;
}

Capture read_capture(const std::filesystem::path& path) {
    PcapReader reader(path);
    Capture capture;
    capture.meta = reader.meta();
    while (auto record = reader.next()) {
        capture.records.push_back(std::move(*record));
    }
    capture.truncated = reader.truncated();
    return capture;
}

PcapWriter::PcapWriter(const std::filesystem::path& path, const CaptureMeta& meta)
    : path_(path), meta_(meta) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) {
        throw IoError("cannot create " + path.string());
    }
    std::array<std::uint8_t, kPcapGlobalHeaderSize> header{};
    put_u32(header.data(), magic_for(meta_), meta_.byte_order);
    put_u16(header.data() + 4, 2, meta_.byte_order);  // version 2.4
    put_u16(header.data() + 6, 4, meta_.byte_order);
    put_u32(header.data() + 8, 0, meta_.byte_order);   // thiszone
    put_u32(header.data() + 12, 0, meta_.byte_order);  // sigfigs
    put_u32(header.data() + 16, meta_.snap_length, meta_.byte_order);
    put_u32(header.data() + 20, static_cast<std::uint32_t>(meta_.link_type), meta_.byte_order);
    out_.write(reinterpret_cast<const char*>(header.data()), header.size());
    bytes_written_ = kPcapGlobalHeaderSize;
}

PcapWriter::~PcapWriter() {
    if (out_.is_open()) out_.close();
}

void PcapWriter::append(const CaptureRecord& record) {
    if (record.payload.size() > meta_.snap_length) {
        throw ValidationError("record " + std::to_string(records_written_) + ": payload of " +
                              std::to_string(record.payload.size()) + " bytes exceeds snap length " +
                              std::to_string(meta_.snap_length));
    }
    if (record.captured_length() > record.original_length) {
        throw ValidationError("record " + std::to_string(records_written_) +
                              ": captured length exceeds original length");
    }
    std::array<std::uint8_t, kPcapRecordHeaderSize> header{};
    put_u32(header.data(), record.ts.sec, meta_.byte_order);
    const std::uint32_t frac = meta_.resolution == TimestampResolution::Micro
                                   ? record.ts.nsec / 1000
                                   : record.ts.nsec;
    put_u32(header.data() + 4, frac, meta_.byte_order);
    put_u32(header.data() + 8, record.captured_length(), meta_.byte_order);
    put_u32(header.data() + 12, record.original_length, meta_.byte_order);
    out_.write(reinterpret_cast<const char*>(header.data()), header.size());
    out_.write(reinterpret_cast<const char*>(record.payload.data()),
               static_cast<std::streamsize>(record.payload.size()));
    if (!out_) {
        throw IoError("write failed on " + path_.string());
    }
    bytes_written_ += kPcapRecordHeaderSize + record.payload.size();
    ++records_written_;
}

void PcapWriter::close() {
    if (!out_.is_open()) return;
    out_.close();
    if (!out_) {
        throw IoError("close failed on " + path_.string());
    }
}

std::uint64_t write_capture(const std::filesystem::path& path, const CaptureMeta& meta,
                            std::span<const CaptureRecord> records) {
    PcapWriter writer(path, meta);
    for (const auto& record : records) {
        writer.append(record);
    }
    writer.close();
    return writer.bytes_written();
}

RotatingPcapWriter::RotatingPcapWriter(const std::filesystem::path& base_path,
                                       const CaptureMeta& meta, const RotationPolicy& policy)
    : base_path_(base_path), meta_(meta), policy_(policy) {
    if (policy_.max_records && *policy_.max_records == 0) {
        throw ValidationError("rotation record limit must be positive");
    }
    if (policy_.max_interval_seconds && *policy_.max_interval_seconds <= 0) {
        throw ValidationError("rotation interval must be positive");
    }
}

void RotatingPcapWriter::open_next() {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "-%04zu", file_index_++);
    auto path = base_path_;
    path.replace_filename(base_path_.stem().string() + suffix +
                          base_path_.extension().string());
    writer_.emplace(path, meta_);
    files_.push_back(path);
}

void RotatingPcapWriter::append(const CaptureRecord& record) {
    if (policy_.max_interval_seconds) {
        const double interval = *policy_.max_interval_seconds;
        if (!window_start_) window_start_ = record.ts.seconds();
        // One file per elapsed window, like a timer-driven saver. Windows
        // without records still get their header-only file.
        while (record.ts.seconds() >= *window_start_ + interval) {
            if (!writer_) open_next();
            rotate();
            *window_start_ += interval;
        }
    }
    if (!writer_) open_next();
    writer_->append(record);
    ++records_written_;
    if (policy_.max_records && writer_->records_written() >= *policy_.max_records) {
        rotate();
    }
}

void RotatingPcapWriter::rotate() {
    if (!writer_) open_next();
    writer_->close();
    writer_.reset();
}

void RotatingPcapWriter::close() {
    if (writer_) {
        writer_->close();
        writer_.reset();
    }
}

std::span<const std::uint8_t> strip_radiotap(const CaptureRecord& record,
                                             const CaptureMeta& meta) {
    std::span<const std::uint8_t> payload{record.payload};
    if (meta.link_type == LinkType::Ieee80211) {
        return payload;
    }
    // Radiotap: u8 version, u8 pad, u16 little-endian total header length.
    if (payload.size() < 4) {
        throw MalformedFrameError("radiotap header cut short at " +
                                  std::to_string(payload.size()) + " bytes");
    }
    const std::uint16_t length =
        static_cast<std::uint16_t>(payload[2]) | static_cast<std::uint16_t>(payload[3]) << 8;
    if (length < 8) {
        throw MalformedFrameError("radiotap length " + std::to_string(length) +
                                  " below the 8-byte minimum");
    }
    if (length > payload.size()) {
        throw MalformedFrameError("radiotap length " + std::to_string(length) +
                                  " exceeds payload of " + std::to_string(payload.size()) +
                                  " bytes");
    }
    return payload.subspan(length);
}

}  // namespace probekit
