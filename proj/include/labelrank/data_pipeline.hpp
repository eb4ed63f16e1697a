// Event-log ingestion and featurization. Per (user, event group, category)
// cell two quantities are derived at a reference time t:
//   intensity = sum over events of alpha^(t - t_i)     (decayed count)
//   recency   = alpha^(t - most recent t_i)            (decayed freshness)
// Features come from the pv/sq/slc/olc groups (optionally adv) at
// T_features; ground-truth rankings come from adc intensities over the
// (T_features, T_labels] window. A seeded synthetic generator provides a
// learnable, cluster-structured stand-in for production logs.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "labelrank/core.hpp"

namespace labelrank {

enum class EventGroup { kPv, kSq, kSlc, kOlc, kAdv, kAdc };

EventGroup event_group_from_string(const std::string& s);
std::string to_string(EventGroup g);

struct EventTuple {
  std::int64_t user = 0;
  EventGroup group = EventGroup::kPv;
  int category = 0;  // 1..L
  std::int64_t timestamp = 0;
};

using EventLog = std::vector<EventTuple>;

struct UserDemographics {
  int age_bucket = -1;  // 0..8
  int gender = -1;      // 0..1
};

using DemographicsMap = std::map<std::int64_t, UserDemographics>;

// TSV: user<TAB>group<TAB>category<TAB>timestamp
EventLog read_event_log(std::istream& in);
EventLog load_event_log(const std::string& path);
void write_event_log(const EventLog& log, std::ostream& out);
void save_event_log(const EventLog& log, const std::string& path);

// TSV: user<TAB>age_bucket<TAB>gender
DemographicsMap read_demographics(std::istream& in);
DemographicsMap load_demographics(const std::string& path);
void write_demographics(const DemographicsMap& demo, std::ostream& out);
void save_demographics(const DemographicsMap& demo, const std::string& path);

// Bijective map from (group, kind, category) cells and demographic slots
// onto [1, d], d = 2*G*L + 9 + 2 with G = 4 (or 5 with the adv group).
struct FeatureLayout {
  int num_labels = 0;
  bool include_adv = false;

  int group_count() const { return include_adv ? 5 : 4; }
  int dim() const { return 2 * group_count() * num_labels + 9 + 2; }

  // group must be a feature group (not adc; adv only when included).
  int intensity_index(EventGroup group, int category) const;
  int recency_index(EventGroup group, int category) const;
  int age_index(int bucket) const;    // bucket 0..8
  int gender_index(int gender) const; // gender 0..1

  struct Slot {
    enum Kind { kIntensity, kRecency, kAge, kGender } kind;
    EventGroup group;  // for intensity/recency
    int category = 0;  // for intensity/recency
    int bucket = 0;    // for age/gender
  };
  Slot decode(int index) const;
};

// sum alpha^(t - t_i) over event times <= t (0 for an empty cell).
double intensity(const std::vector<std::int64_t>& event_times, std::int64_t t,
                 double alpha);
// alpha^(t - most recent t_i); 0 when the cell is empty so the sparse
// encoding can drop it.
double recency_feature(const std::vector<std::int64_t>& event_times,
                       std::int64_t t, double alpha);

// Per-user feature vectors at T_features, keyed and ordered by user id.
// Users appearing in the log or the demographics map are included; only
// events with t_i <= T_features contribute. Throws on categories outside
// the layout.
std::map<std::int64_t, SparseVector> featurize(
    const EventLog& log, const DemographicsMap& demographics,
    std::int64_t t_features, const FeatureLayout& layout, double alpha,
    bool l2_normalize = true);

// Ranking per user from adc intensities over (T_features, T_labels],
// evaluated at T_labels; intensity ties resolve by category id. Users with
// fewer than min_categories distinct clicked categories are dropped.
std::map<std::int64_t, Ranking> build_labels(const EventLog& log,
                                             std::int64_t t_features,
                                             std::int64_t t_labels,
                                             double alpha, int num_labels,
                                             int min_categories = 3);

// Users present in both maps, ascending user id.
RankedDataset make_ranked_dataset(
    const std::map<std::int64_t, SparseVector>& features,
    const std::map<std::int64_t, Ranking>& labels,
    const FeatureLayout& layout);

struct SyntheticConfig {
  int n_users = 10000;
  int num_labels = 20;
  double alpha = 0.98;
  std::int64_t horizon = 240;  // features at horizon/2, labels at horizon
  int n_prototypes = 4;
  double noise = 1.0;  // sampling temperature; -> infinity gives uniform
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticData {
  EventLog events;
  DemographicsMap demographics;
};

// Seeded generation: each user draws a preference prototype (with its own
// category profile, label-side category remap, and demographic skew) plus a
// personal affinity component; feature-group events sample from the user
// affinity and adc events from its remapped counterpart, so rankings are
// predictable from features but the feature-to-label map is
// cluster-dependent.
SyntheticData generate_synthetic(const SyntheticConfig& cfg);

}  // namespace labelrank
