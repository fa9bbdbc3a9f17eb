#include "balmatch/codec.hpp"

#include <cctype>
#include <charconv>
#include <vector>

namespace balmatch {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string object_name(ObjectId x) { return std::string(1, static_cast<char>('a' + index(x))); }

ObjectId parse_object(std::string_view token) {
  token = trim(token);
  if (token.size() != 1 || token[0] < 'a' || token[0] >= 'a' + kMaxSize)
    throw InvalidInput("bad object name '" + std::string(token) + "'");
  return object(token[0] - 'a');
}

std::string agent_name(AgentId i) { return std::to_string(index(i) + 1); }

AgentId parse_agent(std::string_view token) {
  token = trim(token);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size() || v < 1 || v > kMaxSize)
    throw InvalidInput("bad agent name '" + std::string(token) + "'");
  return agent(v - 1);
}

std::string format_preference(const Preference& p) {
  std::string out;
  for (int pos = 0; pos < p.size(); ++pos) {
    if (pos > 0) out += '>';
    out += object_name(p.at(pos));
  }
  return out;
}

Preference parse_preference(std::string_view text) {
  std::vector<ObjectId> ranking;
  for (auto tok : split(trim(text), '>')) ranking.push_back(parse_object(tok));
  return Preference::from_ranking(ranking);
}

std::string format_profile(const Profile& profile) {
  std::string out;
  for (int i = 0; i < profile.size(); ++i) {
    if (i > 0) out += "; ";
    out += format_preference(profile.of(i));
  }
  return out;
}

Profile parse_profile(std::string_view text) {
  std::vector<Preference> prefs;
  for (auto tok : split(trim(text), ';')) prefs.push_back(parse_preference(tok));
  return Profile(prefs);
}

std::string format_matching(const Matching& mu) {
  std::string out = "(";
  for (int i = 0; i < mu.size(); ++i) {
    if (i > 0) out += ',';
    out += object_name(mu.of(i));
  }
  return out + ")";
}

Matching parse_matching(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '(') {
    if (text.back() != ')') throw InvalidInput("unbalanced parenthesis in matching");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<ObjectId> a;
  for (auto tok : split(text, ',')) a.push_back(parse_object(tok));
  return Matching::from_assignment(a);
}

Submatching parse_submatching(int n, std::string_view key) {
  Submatching nu(n);
  key = trim(key);
  if (key.empty()) return nu;
  for (auto pair : split(key, ',')) {
    const auto colon = pair.find(':');
    if (colon == std::string_view::npos) throw InvalidInput("bad submatching pair '" + std::string(pair) + "'");
    const AgentId i = parse_agent(pair.substr(0, colon));
    const ObjectId x = parse_object(pair.substr(colon + 1));
    if (index(i) >= n || index(x) >= n) throw InvalidInput("submatching pair outside instance of size " + std::to_string(n));
    nu.assign(i, x);
  }
  return nu;
}

}  // namespace balmatch
