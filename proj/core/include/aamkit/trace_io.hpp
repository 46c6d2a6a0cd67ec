#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "aamkit/trace.hpp"

namespace aamkit::io {

inline constexpr const char* kTraceSchema = "aamkit.trace/1";

struct TraceHeader {
  std::string scenario;
  std::uint64_t scenario_hash = 0;
  std::uint64_t seed = 0;
};

/// Tab-separated text. '#'-prefixed header lines carry the schema tag,
/// provenance and terminal summary; one row per record follows, reals in
/// shortest round-trip decimal form, points as comma-separated lists; a
/// closing "# end rows=N" line marks a complete file.
void write_trace(std::ostream& out, const AamTrace& trace,
                 const TraceHeader& header = {});
/// Throws IoError when the file cannot be written.
void write_trace(const std::string& path, const AamTrace& trace,
                 const TraceHeader& header = {});

struct TraceFile {
  TraceHeader header;
  AamTrace trace;
};

/// Throws CorruptTraceError (with the offending row) on malformed or
/// truncated input.
TraceFile read_trace(std::istream& in);
/// Throws IoError when the file cannot be opened.
TraceFile read_trace(const std::string& path);

}  // namespace aamkit::io
