#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aoisat/availability.hpp"
#include "aoisat/error.hpp"
#include "aoisat/rng.hpp"

namespace aoisat {

/// Constellation-level visibility samples (1 = some satellite visible).
struct VisibilityTrace {
  double resolution = 1.0;  // seconds per sample
  std::vector<std::uint8_t> samples;
  std::string source;

  bool operator==(const VisibilityTrace&) const = default;
};

enum class TraceFormat { bitline, intervals };

inline TraceFormat parse_trace_format(std::string_view s) {
  if (s == "bitline") return TraceFormat::bitline;
  if (s == "intervals" || s == "interval-list") return TraceFormat::intervals;
  throw ConfigError("unknown trace format '" + std::string(s) + "' (expected bitline or intervals)");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view field, std::size_t line, const char* what) {
  const std::string text(trim(field));
  if (text.empty()) throw ParseError(std::string("empty ") + what, line);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + what + " '" + text + "'", line);
  }
  if (used != text.size() || !std::isfinite(v)) throw ParseError(std::string("bad ") + what + " '" + text + "'", line);
  return v;
}

}  // namespace detail

/// bitline: '0'/'1' characters, any line breaks. intervals: rows
/// "start_s,end_s,state" expanded at the given resolution; gaps between
/// rows are filled with 0. Lines starting with '#' are comments; the first
/// comment becomes the source note.
inline VisibilityTrace parse_trace(std::istream& in, TraceFormat format, double resolution = 1.0) {
  if (!(resolution > 0.0)) throw ConfigError("trace resolution must be positive");
  VisibilityTrace trace;
  trace.resolution = resolution;
  std::string line;
  std::size_t lineno = 0;
  bool have_prev = false;
  double prev_start = 0.0, prev_end = 0.0, origin = 0.0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (!body.empty() && body.front() == '#') {
      if (trace.source.empty()) trace.source = std::string(detail::trim(body.substr(1)));
      continue;
    }
    if (format == TraceFormat::bitline) {
      for (char c : body) {
        if (c == '0' || c == '1')
          trace.samples.push_back(static_cast<std::uint8_t>(c - '0'));
        else if (c != ' ' && c != '\t')
          throw ParseError(std::string("unexpected character '") + c + "' in bitline trace", lineno);
      }
      continue;
    }
    if (body.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = body;
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 3) throw ParseError("expected start_s,end_s,state", lineno);
    const double start = detail::parse_number(fields[0], lineno, "start time");
    const double end = detail::parse_number(fields[1], lineno, "end time");
    const auto state = detail::trim(fields[2]);
    if (state != "0" && state != "1") throw ParseError("state must be 0 or 1", lineno);
    if (!(end > start)) throw ParseError("interval end must exceed its start", lineno);
    if (have_prev && start < prev_start) throw ParseError("interval start times are not monotone", lineno);
    if (have_prev && start < prev_end) throw ParseError("interval overlaps the previous one", lineno);
    if (!have_prev) origin = start;
    const auto first = static_cast<std::size_t>(std::llround((start - origin) / resolution));
    const auto last = static_cast<std::size_t>(std::llround((end - origin) / resolution));
    if (first > trace.samples.size()) trace.samples.resize(first, 0);
    trace.samples.resize(last, static_cast<std::uint8_t>(state == "1"));
    have_prev = true;
    prev_start = start;
    prev_end = end;
  }
  if (trace.samples.empty()) throw ParseError("trace contains no samples", lineno);
  return trace;
}

inline VisibilityTrace parse_trace(std::string_view text, TraceFormat format, double resolution = 1.0) {
  std::istringstream in{std::string(text)};
  return parse_trace(in, format, resolution);
}

inline std::string serialize_trace(const VisibilityTrace& trace, TraceFormat format) {
  std::ostringstream out;
  out.precision(17);
  if (!trace.source.empty()) out << "# " << trace.source << '\n';
  if (format == TraceFormat::bitline) {
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
      out << static_cast<char>('0' + trace.samples[i]);
      if ((i + 1) % 80 == 0 || i + 1 == trace.samples.size()) out << '\n';
    }
    return out.str();
  }
  std::size_t i = 0;
  while (i < trace.samples.size()) {
    std::size_t j = i;
    while (j < trace.samples.size() && trace.samples[j] == trace.samples[i]) ++j;
    out << static_cast<double>(i) * trace.resolution << ',' << static_cast<double>(j) * trace.resolution << ','
        << static_cast<int>(trace.samples[i]) << '\n';
    i = j;
  }
  return out.str();
}

struct TraceStats {
  double availability = 0.0;
  std::optional<double> mean_on_s;   // absent when the trace never shows the state
  std::optional<double> mean_off_s;
  std::size_t on_runs = 0;
  std::size_t off_runs = 0;
  std::size_t samples = 0;
};

/// Run-length statistics over maximal runs; runs cut by either end of the
/// trace count as full runs.
inline TraceStats trace_stats(const VisibilityTrace& trace) {
  if (trace.samples.empty()) throw ContractError("empty trace");
  TraceStats s;
  s.samples = trace.samples.size();
  std::size_t on = 0, on_len = 0, off_len = 0;
  std::size_t i = 0;
  while (i < trace.samples.size()) {
    std::size_t j = i;
    while (j < trace.samples.size() && trace.samples[j] == trace.samples[i]) ++j;
    if (trace.samples[i]) {
      ++s.on_runs;
      on_len += j - i;
    } else {
      ++s.off_runs;
      off_len += j - i;
    }
    i = j;
  }
  on = on_len;
  s.availability = static_cast<double>(on) / static_cast<double>(s.samples);
  if (s.on_runs) s.mean_on_s = static_cast<double>(on_len) * trace.resolution / static_cast<double>(s.on_runs);
  if (s.off_runs) s.mean_off_s = static_cast<double>(off_len) * trace.resolution / static_cast<double>(s.off_runs);
  return s;
}

/// Majority vote of the samples falling in each slot window; ties count as
/// available. A trailing partial window forms its own slot.
inline std::vector<std::uint8_t> resample_trace(const VisibilityTrace& trace, double slot_seconds) {
  if (!(slot_seconds > 0.0)) throw ConfigError("slot length must be positive");
  std::vector<std::uint8_t> slots;
  std::size_t i = 0;
  for (std::size_t slot = 0; i < trace.samples.size(); ++slot) {
    const double window_end = static_cast<double>(slot + 1) * slot_seconds;
    std::size_t ones = 0, total = 0;
    while (i < trace.samples.size() && static_cast<double>(i) * trace.resolution < window_end - 1e-9 * slot_seconds) {
      ones += trace.samples[i];
      ++total;
      ++i;
    }
    if (total == 0) continue;  // window shorter than one sample
    slots.push_back(static_cast<std::uint8_t>(2 * ones >= total));
  }
  return slots;
}

inline AvailabilityProcess trace_to_availability(const VisibilityTrace& trace, double slot_seconds = 1.0,
                                                 TraceWrap wrap = TraceWrap::repeat) {
  return AvailabilityProcess::trace(resample_trace(trace, slot_seconds), wrap);
}

/// Synthetic on/off trace with geometric holding times, started from the
/// stationary state. Defaults match a LEO Walker-Star constellation summary
/// (mean on 967.1 s, mean off 657.0 s at 1 s resolution).
inline VisibilityTrace geometric_trace(std::size_t samples, std::uint64_t seed, double lambda_a = 1.0 / 967.1,
                                       double lambda_u = 1.0 / 657.0, double resolution = 1.0) {
  auto proc = AvailabilityProcess::geometric(lambda_a, lambda_u);
  Rng rng(seed, Stream::availability);
  VisibilityTrace t;
  t.resolution = resolution;
  std::ostringstream note;
  note.precision(6);
  note << "synthetic geometric trace lambda_a=" << lambda_a << " lambda_u=" << lambda_u << " seed=" << seed;
  t.source = note.str();
  t.samples.resize(samples);
  for (auto& s : t.samples) s = proc.step(rng) ? 1 : 0;
  return t;
}

}  // namespace aoisat
