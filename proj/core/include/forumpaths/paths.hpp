#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "forumpaths/ingest.hpp"

namespace forumpaths {

enum class EventKind : char { post = 'p', reply = 'r' };

/// An event in one user's history. A reply event is attributed to the
/// author of the parent post, at the time of the replying post.
struct UserEvent {
  EventKind kind = EventKind::post;
  Timestamp time = 0;
  std::string source_post_id;

  friend bool operator==(const UserEvent&, const UserEvent&) = default;
};

/// Point of the posts/replies lattice: x counts posts, y counts replies.
struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

/// A user's history as a walk on the lattice: one step right per post and
/// one step up per received reply, starting from the origin.
class UserPath {
 public:
  UserPath() = default;

  /// Builds a path from a string over {p, r}. Throws std::invalid_argument
  /// on other characters or when a nonempty string does not start with 'p'.
  static UserPath from_symbols(std::string user_id, std::string symbols);

  const std::string& user_id() const noexcept { return user_id_; }
  const std::string& symbols() const noexcept { return symbols_; }
  const std::vector<LatticePoint>& points() const noexcept { return points_; }

  std::size_t length() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  std::int64_t posts() const noexcept { return points_.back().x; }
  std::int64_t replies() const noexcept { return points_.back().y; }

  friend bool operator==(const UserPath&, const UserPath&) = default;

 private:
  std::string user_id_;
  std::string symbols_;
  std::vector<LatticePoint> points_{LatticePoint{}};
};

/// Registration time plus the event times aligned with the path symbols.
struct TimingVector {
  Timestamp t0 = 0;
  std::vector<Timestamp> event_times;

  friend bool operator==(const TimingVector&, const TimingVector&) = default;
};

struct UserHistory {
  UserPath path;
  TimingVector timing;

  friend bool operator==(const UserHistory&, const UserHistory&) = default;
};

/// All decoupled user histories of one forum. Immutable once built.
struct ForumArchive {
  std::string forum_id;
  std::map<std::string, UserHistory> users;

  bool empty() const noexcept { return users.empty(); }
  std::size_t size() const noexcept { return users.size(); }
};

/// Splits a validated, totally ordered forum log into per-user event
/// sequences. Only users in `users` receive events; a self-reply counts
/// once as a post and replies to users outside the set are not attributed.
std::map<std::string, std::vector<UserEvent>> derive_user_events(
    const std::vector<RawEvent>& forum_events, const std::set<std::string>& users);

/// Throws std::logic_error when the first event is a reply (an attribution
/// bug upstream) and std::invalid_argument when t0 is after the first event.
UserHistory build_user_path(std::string user_id, const std::vector<UserEvent>& events,
                            Timestamp t0);

/// Derives events and paths for every user in `registration`.
ForumArchive build_archive(std::string forum_id, const std::vector<RawEvent>& forum_events,
                           const std::map<std::string, Timestamp>& registration);

/// Inverse of the decoupling: the (kind, time) sequence encoded by a history.
std::vector<std::pair<EventKind, Timestamp>> recompose(const UserHistory& history);

/// Lengths of the maximal post blocks in "r" + symbols + "r".
std::vector<std::int64_t> post_runs(const UserPath& path);

/// Sample Pearson correlation of x and y over all path points, origin
/// included. Throws UndefinedStatistic when either coordinate is constant.
double path_pearson(const UserPath& path);

struct Degree {
  std::int64_t in = 0;   // replies received
  std::int64_t out = 0;  // replies made
  std::int64_t total() const noexcept { return in + out; }

  friend bool operator==(const Degree&, const Degree&) = default;
};

/// Directed multigraph of replies between distinct authors. Every author
/// appears, including those without edges.
std::map<std::string, Degree> build_reply_graph(const std::vector<RawEvent>& forum_events);

/// Seconds between the first and last post (replies ignored); nullopt for
/// users without posts.
std::optional<Timestamp> user_up_time(const std::vector<UserEvent>& events);
std::optional<Timestamp> user_up_time(const UserHistory& history);

/// Loss-free JSONL: {"user_id", "symbols", "t0", "event_times"} per line.
/// The first line of a forum file may carry {"forum_id": ...}.
void write_paths_jsonl(std::ostream& out, const ForumArchive& archive);
ForumArchive read_paths_jsonl(std::istream& in, std::string default_forum_id = {});

}  // namespace forumpaths
