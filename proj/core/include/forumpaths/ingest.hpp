#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace forumpaths {

using Timestamp = std::int64_t;  // seconds since the Unix epoch

/// One post record from a forum dump.
struct RawEvent {
  std::string forum_id;
  std::string post_id;
  std::string author_id;
  Timestamp timestamp = 0;
  std::optional<std::string> parent_post_id;  // empty => thread starter

  friend bool operator==(const RawEvent&, const RawEvent&) = default;
};

enum class LogFormat { csv, jsonl };

LogFormat parse_log_format(std::string_view name);  // throws std::invalid_argument
std::string_view to_string(LogFormat format);

struct ParseIssue {
  std::size_t line = 0;  // 1-based line in the input stream
  std::string message;
};

struct ParseResult {
  std::vector<RawEvent> events;   // file order
  std::vector<ParseIssue> errors; // rows that could not be decoded
};

/// Decodes an event log. Row-level problems are collected in
/// ParseResult::errors; a missing or wrong CSV header throws DataError
/// since no row could be interpreted.
ParseResult parse_event_log(std::istream& in, LogFormat format);

/// Canonical serialization; parse_event_log reads it back unchanged.
void write_event_log(std::ostream& out, const std::vector<RawEvent>& events, LogFormat format);

/// Integer epoch seconds or an RFC 3339 date-time ("2006-01-01T00:00:00Z",
/// optional fractional seconds, 'Z' or a +hh:mm offset). Fractions are
/// truncated toward negative infinity. Throws DataError.
Timestamp parse_timestamp(std::string_view text);

enum class ValidationPolicy { strict, lenient };

ValidationPolicy parse_validation_policy(std::string_view name);

struct TimeWindow {
  Timestamp begin = 0;
  Timestamp end = 0;  // inclusive

  bool contains(Timestamp t) const noexcept { return t >= begin && t <= end; }
};

struct ValidationOptions {
  ValidationPolicy policy = ValidationPolicy::lenient;
  std::optional<TimeWindow> dataset_window;  // [T0, T1]
};

struct ValidatedForums {
  // forum_id -> events sorted by (timestamp, post_id)
  std::map<std::string, std::vector<RawEvent>> forums;
  std::vector<std::string> warnings;
};

/// Checks post-id uniqueness and parent references per forum.
///
/// Duplicate post ids always throw DataError. A dangling parent, a parent
/// newer than its child, or an event outside the dataset window throws
/// under the strict policy; under the lenient policy the first two turn
/// the event into a thread starter and the last drops it, each with a
/// warning.
ValidatedForums resolve_and_validate(std::vector<RawEvent> events,
                                     const ValidationOptions& options = {});

/// Uniform sample without replacement of round-half-up(fraction * |users|)
/// ids. Deterministic for a fixed seed. Returns ids in sorted order.
std::set<std::string> sample_users(const std::set<std::string>& user_ids, double fraction,
                                   std::uint64_t seed);

using RegistrationTable = std::map<std::string, Timestamp>;

/// Reads "user_id,registration_timestamp" rows (header required).
RegistrationTable parse_registration_csv(std::istream& in);

struct RegistrationScope {
  std::map<std::string, Timestamp> registration;  // retained users only
  std::set<std::string> retained;
  std::vector<std::string> warnings;
};

/// Assigns each author a registration time: the table entry when present,
/// otherwise their first post. Users registered outside `window` are
/// dropped. A registration later than the user's first post is an error
/// under the strict policy; lenient falls back to the first post time.
RegistrationScope scope_registration(const std::vector<RawEvent>& forum_events,
                                     const RegistrationTable* registrations,
                                     const std::optional<TimeWindow>& window,
                                     ValidationPolicy policy = ValidationPolicy::lenient);

std::set<std::string> authors_of(const std::vector<RawEvent>& forum_events);

}  // namespace forumpaths
