#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace probekit {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// File is not a classic pcap, or declares a link type we do not handle.
class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

// A record header or payload ended mid-way through the file. Carries the
// number of complete records read before the cut.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, std::size_t records_read)
        : Error(what), records_read_(records_read) {}

    std::size_t records_read() const { return records_read_; }

private:
    std::size_t records_read_;
};

// Frame bytes too short or internally inconsistent to decode.
class MalformedFrameError : public Error {
public:
    using Error::Error;
};

// Bad parameters, bad config content, or violated preconditions.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace probekit
