#include "forumpaths/paths.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "forumpaths/error.hpp"
#include "forumpaths/stats.hpp"

namespace forumpaths {

UserPath UserPath::from_symbols(std::string user_id, std::string symbols) {
  if (!symbols.empty() && symbols.front() != 'p')
    throw std::invalid_argument(fmt::format("path of '{}' must start with a post", user_id));
  UserPath path;
  path.user_id_ = std::move(user_id);
  path.points_.reserve(symbols.size() + 1);
  LatticePoint at{};
  for (char c : symbols) {
    if (c == 'p')
      ++at.x;
    else if (c == 'r')
      ++at.y;
    else
      throw std::invalid_argument(fmt::format("invalid path symbol '{}'", c));
    path.points_.push_back(at);
  }
  path.symbols_ = std::move(symbols);
  return path;
}

std::map<std::string, std::vector<UserEvent>> derive_user_events(
    const std::vector<RawEvent>& forum_events, const std::set<std::string>& users) {
  std::unordered_map<std::string_view, std::string_view> author_of;
  author_of.reserve(forum_events.size());
  for (const auto& ev : forum_events) author_of.emplace(ev.post_id, ev.author_id);

  std::map<std::string, std::vector<UserEvent>> out;
  for (const auto& u : users) out[u];

  for (const auto& ev : forum_events) {
    if (auto it = out.find(ev.author_id); it != out.end())
      it->second.push_back({EventKind::post, ev.timestamp, ev.post_id});
    if (!ev.parent_post_id) continue;
    auto parent = author_of.find(*ev.parent_post_id);
    if (parent == author_of.end() || parent->second == ev.author_id) continue;
    if (auto it = out.find(std::string(parent->second)); it != out.end())
      it->second.push_back({EventKind::reply, ev.timestamp, ev.post_id});
  }
  return out;
}

UserHistory build_user_path(std::string user_id, const std::vector<UserEvent>& events,
                            Timestamp t0) {
  if (!events.empty() && events.front().kind != EventKind::post)
    throw std::logic_error(fmt::format("history of '{}' starts with a reply", user_id));
  std::string symbols;
  symbols.reserve(events.size());
  TimingVector timing{t0, {}};
  timing.event_times.reserve(events.size());
  for (const auto& ev : events) {
    if (!timing.event_times.empty() && ev.time < timing.event_times.back())
      throw std::invalid_argument(fmt::format("events of '{}' are not time-ordered", user_id));
    symbols.push_back(static_cast<char>(ev.kind));
    timing.event_times.push_back(ev.time);
  }
  if (!timing.event_times.empty() && t0 > timing.event_times.front())
    throw std::invalid_argument(
        fmt::format("registration of '{}' is after the first event", user_id));
  return {UserPath::from_symbols(std::move(user_id), std::move(symbols)), std::move(timing)};
}

ForumArchive build_archive(std::string forum_id, const std::vector<RawEvent>& forum_events,
                           const std::map<std::string, Timestamp>& registration) {
  std::set<std::string> users;
  for (const auto& [u, _] : registration) users.insert(u);
  auto events = derive_user_events(forum_events, users);
  ForumArchive archive{std::move(forum_id), {}};
  for (auto& [user, list] : events)
    archive.users.emplace(user, build_user_path(user, list, registration.at(user)));
  return archive;
}

std::vector<std::pair<EventKind, Timestamp>> recompose(const UserHistory& history) {
  const auto& symbols = history.path.symbols();
  const auto& times = history.timing.event_times;
  if (symbols.size() != times.size())
    throw std::invalid_argument("path and timing vector have different lengths");
  std::vector<std::pair<EventKind, Timestamp>> out;
  out.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i)
    out.emplace_back(static_cast<EventKind>(symbols[i]), times[i]);
  return out;
}

std::vector<std::int64_t> post_runs(const UserPath& path) {
  std::vector<std::int64_t> runs;
  std::int64_t current = 0;
  for (char c : path.symbols()) {
    if (c == 'p') {
      ++current;
    } else if (current > 0) {
      runs.push_back(current);
      current = 0;
    }
  }
  if (current > 0) runs.push_back(current);
  return runs;
}

double path_pearson(const UserPath& path) {
  const auto& pts = path.points();
  std::vector<double> x, y;
  x.reserve(pts.size());
  y.reserve(pts.size());
  for (const auto& p : pts) {
    x.push_back(static_cast<double>(p.x));
    y.push_back(static_cast<double>(p.y));
  }
  return stats::pearson(x, y);
}

std::map<std::string, Degree> build_reply_graph(const std::vector<RawEvent>& forum_events) {
  std::unordered_map<std::string_view, std::string_view> author_of;
  author_of.reserve(forum_events.size());
  for (const auto& ev : forum_events) author_of.emplace(ev.post_id, ev.author_id);

  std::map<std::string, Degree> graph;
  for (const auto& ev : forum_events) {
    graph[ev.author_id];
    if (!ev.parent_post_id) continue;
    auto parent = author_of.find(*ev.parent_post_id);
    if (parent == author_of.end() || parent->second == ev.author_id) continue;
    ++graph[ev.author_id].out;
    ++graph[std::string(parent->second)].in;
  }
  return graph;
}

std::optional<Timestamp> user_up_time(const std::vector<UserEvent>& events) {
  std::optional<Timestamp> first, last;
  for (const auto& ev : events) {
    if (ev.kind != EventKind::post) continue;
    if (!first) first = ev.time;
    last = ev.time;
  }
  if (!first) return std::nullopt;
  return *last - *first;
}

std::optional<Timestamp> user_up_time(const UserHistory& history) {
  std::vector<UserEvent> events;
  for (const auto& [kind, time] : recompose(history)) events.push_back({kind, time, {}});
  return user_up_time(events);
}

void write_paths_jsonl(std::ostream& out, const ForumArchive& archive) {
  nlohmann::ordered_json header;
  header["forum_id"] = archive.forum_id;
  out << header.dump() << '\n';
  for (const auto& [user, history] : archive.users) {
    nlohmann::ordered_json row;
    row["user_id"] = user;
    row["symbols"] = history.path.symbols();
    row["t0"] = history.timing.t0;
    row["event_times"] = history.timing.event_times;
    out << row.dump() << '\n';
  }
}

ForumArchive read_paths_jsonl(std::istream& in, std::string default_forum_id) {
  ForumArchive archive{std::move(default_forum_id), {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      if (!obj.contains("user_id")) {
        if (obj.contains("forum_id")) archive.forum_id = obj.at("forum_id").get<std::string>();
        continue;
      }
      auto user = obj.at("user_id").get<std::string>();
      TimingVector timing{obj.at("t0").get<Timestamp>(),
                          obj.at("event_times").get<std::vector<Timestamp>>()};
      const auto& symbols = obj.at("symbols").get_ref<const std::string&>();
      if (symbols.size() != timing.event_times.size())
        throw DataError("symbols and event_times differ in length");
      std::vector<UserEvent> events;
      events.reserve(symbols.size());
      for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (symbols[i] != 'p' && symbols[i] != 'r') throw DataError("invalid path symbol");
        events.push_back({static_cast<EventKind>(symbols[i]), timing.event_times[i], {}});
      }
      auto history = build_user_path(user, events, timing.t0);
      if (!archive.users.emplace(user, std::move(history)).second)
        throw DataError(fmt::format("duplicate user '{}'", user));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("paths line {}: {}", line_no, e.what()));
    } catch (const std::exception& e) {
      throw DataError(fmt::format("paths line {}: {}", line_no, e.what()));
    }
  }
  return archive;
}

}  // namespace forumpaths
