#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluct/community.hpp"

namespace fluct {

struct CommunityMatch {
  Community child;                  // snapshot t
  std::optional<Community> parent;  // snapshot t-1, max overlap
  std::size_t overlap = 0;
  double persistence = 0.0;  // overlap / |child|
  double continuity = 0.0;   // overlap / |parent|
};

enum class Role { Joining, Previous, Leaving, Staying };
enum class Task { JoinVsPrevious, LeaveVsStay };

std::string_view to_string(Role role);
std::string_view to_string(Task task);
Role parse_role(std::string_view name);
Task parse_task(std::string_view name);

Task task_of(Role role);
/// Joining and Leaving are the positive class of their task.
bool is_positive(Role role);

struct RoleLabel {
  std::string user_id;
  std::size_t snapshot_index = 0;  // current snapshot t
  Role role = Role::Joining;
  /// Child community for Joining/Previous, parent community for Leaving/Staying.
  std::size_t community_id = 0;

  bool operator==(const RoleLabel&) const = default;
};

/// Pairs every current community with the previous community of largest
/// overlap (lowest id on ties); no parent when nothing overlaps.
std::vector<CommunityMatch> match_communities(const std::vector<Community>& current,
                                              const std::vector<Community>& previous);

/// Applies the role rules to the matches of one snapshot pair.
///
/// persistence > 0.5: child-only members are Joining, shared members Previous.
/// continuity >= 0.5: parent-only members are Leaving, shared members Staying.
///
/// A user receives at most one label per task; when several matches would
/// label the same user, the match with the lowest child id wins.
std::vector<RoleLabel> label_roles(const std::vector<CommunityMatch>& matches);

/// Labels every consecutive pair. `by_snapshot[t]` holds the communities of
/// snapshot t. Output is sorted by (snapshot, role name, user).
std::vector<RoleLabel> label_all_snapshots(
    const std::vector<std::vector<Community>>& by_snapshot);

void sort_labels(std::vector<RoleLabel>& labels);

/// CSV snapshot_index,user_id,role,community_id.
void write_roles(std::ostream& out, const std::vector<RoleLabel>& labels, bool header = true);

}  // namespace fluct
