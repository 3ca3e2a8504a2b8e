#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace songtuple {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SONGTUPLE_ERROR(Name)                  \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    }

SONGTUPLE_ERROR(OutOfRange);
SONGTUPLE_ERROR(EmptyInput);
SONGTUPLE_ERROR(InvalidDuration);
SONGTUPLE_ERROR(InvalidBin);
SONGTUPLE_ERROR(InvalidConfig);
SONGTUPLE_ERROR(PitchOutOfVocabulary);
SONGTUPLE_ERROR(InvalidEntry);
SONGTUPLE_ERROR(UnsupportedMidi);
SONGTUPLE_ERROR(NoTracks);
SONGTUPLE_ERROR(FewerNotesThanWords);
SONGTUPLE_ERROR(InvalidAlignment);
SONGTUPLE_ERROR(DimensionMismatch);
SONGTUPLE_ERROR(ZeroVector);
SONGTUPLE_ERROR(EmptyCorpus);
SONGTUPLE_ERROR(InvalidParams);
SONGTUPLE_ERROR(IoError);

#undef SONGTUPLE_ERROR

/// Tuple-text syntax error. Line and column are 1-based; column counts bytes.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, std::string reason)
        : Error("line " + std::to_string(line) + " column " + std::to_string(column) + ": " + reason),
          line_(line), column_(column), reason_(std::move(reason)) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string reason_;
};

class MalformedMidi : public Error {
public:
    MalformedMidi(std::size_t offset, const std::string& reason)
        : Error("malformed MIDI at byte " + std::to_string(offset) + ": " + reason), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace songtuple
