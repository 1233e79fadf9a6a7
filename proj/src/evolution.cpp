#include "fluct/evolution.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

#include "fluct/csv.hpp"

namespace fluct {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Joining: return "Joining";
    case Role::Previous: return "Previous";
    case Role::Leaving: return "Leaving";
    case Role::Staying: return "Staying";
  }
  return "?";
}

std::string_view to_string(Task task) {
  return task == Task::JoinVsPrevious ? "JoinVsPrevious" : "LeaveVsStay";
}

Role parse_role(std::string_view name) {
  for (Role r : {Role::Joining, Role::Previous, Role::Leaving, Role::Staying}) {
    if (to_string(r) == name) return r;
  }
  throw std::invalid_argument("unknown role '" + std::string(name) + "'");
}

Task parse_task(std::string_view name) {
  for (Task t : {Task::JoinVsPrevious, Task::LeaveVsStay}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

Task task_of(Role role) {
  return role == Role::Joining || role == Role::Previous ? Task::JoinVsPrevious : Task::LeaveVsStay;
}

bool is_positive(Role role) { return role == Role::Joining || role == Role::Leaving; }

namespace {

std::size_t overlap_size(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t count = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

std::vector<std::string> sorted_members(const Community& c) {
  std::vector<std::string> m = c.members;
  std::sort(m.begin(), m.end());
  return m;
}

}  // namespace

std::vector<CommunityMatch> match_communities(const std::vector<Community>& current,
                                              const std::vector<Community>& previous) {
  std::vector<const Community*> prev_sorted;
  for (const auto& p : previous) prev_sorted.push_back(&p);
  std::sort(prev_sorted.begin(), prev_sorted.end(), [](const Community* a, const Community* b) {
    return a->community_id < b->community_id;
  });
  std::vector<std::vector<std::string>> prev_members;
  for (const Community* p : prev_sorted) prev_members.push_back(sorted_members(*p));

  std::vector<CommunityMatch> matches;
  for (const auto& child : current) {
    CommunityMatch match;
    match.child = child;
    std::sort(match.child.members.begin(), match.child.members.end());
    std::size_t best = 0;
    const Community* parent = nullptr;
    for (std::size_t i = 0; i < prev_sorted.size(); ++i) {
      std::size_t ov = overlap_size(match.child.members, prev_members[i]);
      if (ov > best) {  // strict: the lowest id keeps ties
        best = ov;
        parent = prev_sorted[i];
      }
    }
    match.overlap = best;
    if (parent) {
      match.parent = *parent;
      std::sort(match.parent->members.begin(), match.parent->members.end());
      match.persistence = match.child.members.empty()
                              ? 0.0
                              : static_cast<double>(best) / static_cast<double>(match.child.members.size());
      match.continuity = static_cast<double>(best) / static_cast<double>(match.parent->members.size());
    }
    matches.push_back(std::move(match));
  }
  std::sort(matches.begin(), matches.end(), [](const CommunityMatch& a, const CommunityMatch& b) {
    return a.child.community_id < b.child.community_id;
  });
  return matches;
}

std::vector<RoleLabel> label_roles(const std::vector<CommunityMatch>& matches) {
  std::vector<const CommunityMatch*> ordered;
  for (const auto& m : matches) ordered.push_back(&m);
  std::sort(ordered.begin(), ordered.end(), [](const CommunityMatch* a, const CommunityMatch* b) {
    return a->child.community_id < b->child.community_id;
  });

  std::vector<RoleLabel> labels;
  std::set<std::pair<std::string, Task>> labeled;
  auto emit = [&](const std::string& user, std::size_t snapshot, Role role, std::size_t community) {
    if (labeled.emplace(user, task_of(role)).second) {
      labels.push_back({user, snapshot, role, community});
    }
  };

  for (const CommunityMatch* m : ordered) {
    if (!m->parent) continue;
    const Community& child = m->child;
    const Community& parent = *m->parent;
    const std::size_t t = child.snapshot_index;
    if (m->persistence > 0.5) {
      for (const auto& user : child.members) {
        emit(user, t, parent.contains(user) ? Role::Previous : Role::Joining, child.community_id);
      }
    }
    if (m->continuity >= 0.5) {
      for (const auto& user : parent.members) {
        emit(user, t, child.contains(user) ? Role::Staying : Role::Leaving, parent.community_id);
      }
    }
  }
  sort_labels(labels);
  return labels;
}

std::vector<RoleLabel> label_all_snapshots(const std::vector<std::vector<Community>>& by_snapshot) {
  std::vector<RoleLabel> all;
  for (std::size_t t = 1; t < by_snapshot.size(); ++t) {
    auto labels = label_roles(match_communities(by_snapshot[t], by_snapshot[t - 1]));
    all.insert(all.end(), labels.begin(), labels.end());
  }
  sort_labels(all);
  return all;
}

void sort_labels(std::vector<RoleLabel>& labels) {
  std::sort(labels.begin(), labels.end(), [](const RoleLabel& a, const RoleLabel& b) {
    return std::make_tuple(a.snapshot_index, to_string(a.role), std::string_view(a.user_id),
                           a.community_id) <
           std::make_tuple(b.snapshot_index, to_string(b.role), std::string_view(b.user_id),
                           b.community_id);
  });
}

void write_roles(std::ostream& out, const std::vector<RoleLabel>& labels, bool header) {
  if (header) out << "snapshot_index,user_id,role,community_id\n";
  std::vector<RoleLabel> sorted = labels;
  sort_labels(sorted);
  for (const auto& l : sorted) {
    csv::write_row(out, {std::to_string(l.snapshot_index), l.user_id, std::string(to_string(l.role)),
                         std::to_string(l.community_id)});
  }
}

}  // namespace fluct
