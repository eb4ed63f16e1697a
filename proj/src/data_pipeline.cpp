#include "labelrank/data_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace labelrank {

EventGroup event_group_from_string(const std::string& s) {
  if (s == "pv") return EventGroup::kPv;
  if (s == "sq") return EventGroup::kSq;
  if (s == "slc") return EventGroup::kSlc;
  if (s == "olc") return EventGroup::kOlc;
  if (s == "adv") return EventGroup::kAdv;
  if (s == "adc") return EventGroup::kAdc;
  throw std::invalid_argument("unknown event group '" + s + "'");
}

std::string to_string(EventGroup g) {
  switch (g) {
    case EventGroup::kPv: return "pv";
    case EventGroup::kSq: return "sq";
    case EventGroup::kSlc: return "slc";
    case EventGroup::kOlc: return "olc";
    case EventGroup::kAdv: return "adv";
    case EventGroup::kAdc: return "adc";
  }
  throw std::logic_error("bad event group");
}

EventLog read_event_log(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string user_s, group_s, cat_s, ts_s;
    if (!std::getline(ls, user_s, '\t') || !std::getline(ls, group_s, '\t') ||
        !std::getline(ls, cat_s, '\t') || !std::getline(ls, ts_s)) {
      throw std::runtime_error("event log line " + std::to_string(line_no) +
                               ": expected 4 tab-separated fields");
    }
    try {
      EventTuple e;
      e.user = std::stoll(user_s);
      e.group = event_group_from_string(group_s);
      e.category = std::stoi(cat_s);
      e.timestamp = std::stoll(ts_s);
      if (e.category < 1) throw std::invalid_argument("category must be >= 1");
      log.push_back(e);
    } catch (const std::exception& ex) {
      throw std::runtime_error("event log line " + std::to_string(line_no) +
                               ": " + ex.what());
    }
  }
  return log;
}

EventLog load_event_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_event_log(in);
}

void write_event_log(const EventLog& log, std::ostream& out) {
  for (const auto& e : log) {
    out << e.user << '\t' << to_string(e.group) << '\t' << e.category << '\t'
        << e.timestamp << "\n";
  }
}

void save_event_log(const EventLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_event_log(log, out);
}

DemographicsMap read_demographics(std::istream& in) {
  DemographicsMap demo;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string user_s, age_s, gender_s;
    if (!std::getline(ls, user_s, '\t') || !std::getline(ls, age_s, '\t') ||
        !std::getline(ls, gender_s)) {
      throw std::runtime_error("demographics line " + std::to_string(line_no) +
                               ": expected 3 tab-separated fields");
    }
    try {
      UserDemographics d;
      const std::int64_t user = std::stoll(user_s);
      d.age_bucket = std::stoi(age_s);
      d.gender = std::stoi(gender_s);
      if (d.age_bucket < 0 || d.age_bucket > 8) {
        throw std::invalid_argument("age bucket out of range 0..8");
      }
      if (d.gender < 0 || d.gender > 1) {
        throw std::invalid_argument("gender out of range 0..1");
      }
      demo[user] = d;
    } catch (const std::exception& ex) {
      throw std::runtime_error("demographics line " + std::to_string(line_no) +
                               ": " + ex.what());
    }
  }
  return demo;
}

DemographicsMap load_demographics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_demographics(in);
}

void write_demographics(const DemographicsMap& demo, std::ostream& out) {
  for (const auto& [user, d] : demo) {
    out << user << '\t' << d.age_bucket << '\t' << d.gender << "\n";
  }
}

void save_demographics(const DemographicsMap& demo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_demographics(demo, out);
}

namespace {

int feature_group_offset(const FeatureLayout& layout, EventGroup group) {
  switch (group) {
    case EventGroup::kPv: return 0;
    case EventGroup::kSq: return 1;
    case EventGroup::kSlc: return 2;
    case EventGroup::kOlc: return 3;
    case EventGroup::kAdv:
      if (layout.include_adv) return 4;
      throw std::invalid_argument("adv group not part of this layout");
    case EventGroup::kAdc:
      throw std::invalid_argument("adc events are labels, not features");
  }
  throw std::logic_error("bad event group");
}

void check_category(const FeatureLayout& layout, int category) {
  if (category < 1 || category > layout.num_labels) {
    throw std::invalid_argument("category " + std::to_string(category) +
                                " out of range [1, " +
                                std::to_string(layout.num_labels) + "]");
  }
}

}  // namespace

int FeatureLayout::intensity_index(EventGroup group, int category) const {
  check_category(*this, category);
  return feature_group_offset(*this, group) * 2 * num_labels + category;
}

int FeatureLayout::recency_index(EventGroup group, int category) const {
  check_category(*this, category);
  return feature_group_offset(*this, group) * 2 * num_labels + num_labels +
         category;
}

int FeatureLayout::age_index(int bucket) const {
  if (bucket < 0 || bucket > 8) throw std::invalid_argument("bad age bucket");
  return 2 * group_count() * num_labels + 1 + bucket;
}

int FeatureLayout::gender_index(int gender) const {
  if (gender < 0 || gender > 1) throw std::invalid_argument("bad gender");
  return 2 * group_count() * num_labels + 10 + gender;
}

FeatureLayout::Slot FeatureLayout::decode(int index) const {
  if (index < 1 || index > dim()) {
    throw std::invalid_argument("feature index out of range");
  }
  const int L = num_labels;
  const int cells = 2 * group_count() * L;
  Slot slot{};
  if (index <= cells) {
    const int g = (index - 1) / (2 * L);
    const int within = index - g * 2 * L;
    constexpr EventGroup kGroups[] = {EventGroup::kPv, EventGroup::kSq,
                                      EventGroup::kSlc, EventGroup::kOlc,
                                      EventGroup::kAdv};
    slot.group = kGroups[g];
    if (within <= L) {
      slot.kind = Slot::kIntensity;
      slot.category = within;
    } else {
      slot.kind = Slot::kRecency;
      slot.category = within - L;
    }
    return slot;
  }
  const int demo = index - cells;
  if (demo <= 9) {
    slot.kind = Slot::kAge;
    slot.bucket = demo - 1;
  } else {
    slot.kind = Slot::kGender;
    slot.bucket = demo - 10;
  }
  return slot;
}

double intensity(const std::vector<std::int64_t>& event_times, std::int64_t t,
                 double alpha) {
  double sum = 0.0;
  for (std::int64_t ti : event_times) {
    sum += std::pow(alpha, static_cast<double>(t - ti));
  }
  return sum;
}

double recency_feature(const std::vector<std::int64_t>& event_times,
                       std::int64_t t, double alpha) {
  if (event_times.empty()) return 0.0;
  std::int64_t r = t - event_times.front();
  for (std::int64_t ti : event_times) r = std::min(r, t - ti);
  return std::pow(alpha, static_cast<double>(r));
}

std::map<std::int64_t, SparseVector> featurize(
    const EventLog& log, const DemographicsMap& demographics,
    std::int64_t t_features, const FeatureLayout& layout, double alpha,
    bool l2_normalize) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in (0, 1)");
  }
  struct Cell {
    double intensity_sum = 0.0;
    std::int64_t min_age = -1;
  };
  // (group offset, category) -> accumulated cell, per user
  std::map<std::int64_t, std::map<std::pair<int, int>, Cell>> per_user;

  for (const auto& e : log) {
    per_user.try_emplace(e.user);  // every logged user gets a vector
    if (e.timestamp > t_features) continue;
    if (e.group == EventGroup::kAdc) continue;
    if (e.group == EventGroup::kAdv && !layout.include_adv) continue;
    check_category(layout, e.category);
    const int g = feature_group_offset(layout, e.group);
    Cell& cell = per_user[e.user][{g, e.category}];
    const std::int64_t age = t_features - e.timestamp;
    cell.intensity_sum += std::pow(alpha, static_cast<double>(age));
    if (cell.min_age < 0 || age < cell.min_age) cell.min_age = age;
  }
  for (const auto& [user, d] : demographics) per_user.try_emplace(user);

  std::map<std::int64_t, SparseVector> out;
  const int L = layout.num_labels;
  for (const auto& [user, cells] : per_user) {
    std::vector<std::pair<int, double>> entries;
    entries.reserve(cells.size() * 2 + 2);
    for (const auto& [key, cell] : cells) {
      const int base = key.first * 2 * L;
      entries.emplace_back(base + key.second, cell.intensity_sum);
      entries.emplace_back(
          base + L + key.second,
          std::pow(alpha, static_cast<double>(cell.min_age)));
    }
    auto demo_it = demographics.find(user);
    if (demo_it != demographics.end()) {
      const auto& d = demo_it->second;
      if (d.age_bucket >= 0 && d.age_bucket <= 8) {
        entries.emplace_back(layout.age_index(d.age_bucket), 1.0);
      }
      if (d.gender >= 0 && d.gender <= 1) {
        entries.emplace_back(layout.gender_index(d.gender), 1.0);
      }
    }
    SparseVector x = SparseVector::from_entries(std::move(entries), layout.dim());
    out.emplace(user, l2_normalize ? x.normalized() : std::move(x));
  }
  return out;
}

std::map<std::int64_t, Ranking> build_labels(const EventLog& log,
                                             std::int64_t t_features,
                                             std::int64_t t_labels,
                                             double alpha, int num_labels,
                                             int min_categories) {
  if (t_features >= t_labels) {
    throw std::invalid_argument("t_features must be < t_labels");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in (0, 1)");
  }
  std::map<std::int64_t, std::map<int, double>> clicks;
  for (const auto& e : log) {
    if (e.group != EventGroup::kAdc) continue;
    if (e.timestamp <= t_features || e.timestamp > t_labels) continue;
    if (e.category < 1 || e.category > num_labels) {
      throw std::invalid_argument("adc category out of range");
    }
    clicks[e.user][e.category] +=
        std::pow(alpha, static_cast<double>(t_labels - e.timestamp));
  }

  std::map<std::int64_t, Ranking> out;
  for (const auto& [user, by_cat] : clicks) {
    std::vector<std::pair<int, double>> ranked;
    for (const auto& [cat, val] : by_cat) {
      if (val > 0.0) ranked.emplace_back(cat, val);
    }
    if (static_cast<int>(ranked.size()) < min_categories) continue;
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::vector<int> labels;
    labels.reserve(ranked.size());
    for (const auto& [cat, val] : ranked) labels.push_back(cat);
    out.emplace(user, Ranking(std::move(labels)));
  }
  return out;
}

RankedDataset make_ranked_dataset(
    const std::map<std::int64_t, SparseVector>& features,
    const std::map<std::int64_t, Ranking>& labels,
    const FeatureLayout& layout) {
  RankedDataset data;
  data.num_labels = layout.num_labels;
  data.dim = layout.dim();
  for (const auto& [user, truth] : labels) {
    auto it = features.find(user);
    if (it == features.end()) continue;
    data.instances.push_back({it->second, truth});
  }
  return data;
}

void SyntheticConfig::validate() const {
  if (n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  if (num_labels < 2) throw std::invalid_argument("num_labels must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in (0, 1)");
  }
  if (horizon < 2) throw std::invalid_argument("horizon must be >= 2");
  if (n_prototypes < 1) throw std::invalid_argument("n_prototypes must be >= 1");
  if (!(noise > 0.0)) throw std::invalid_argument("noise must be > 0");
}

namespace {

// Mean event counts per user and group over the whole horizon.
constexpr double kPvRate = 30.0;
constexpr double kSqRate = 12.0;
constexpr double kSlcRate = 8.0;
constexpr double kOlcRate = 5.0;
constexpr double kAdvRate = 15.0;
constexpr double kAdcRate = 30.0;
// Share of the per-user affinity that is personal rather than prototype.
constexpr double kPersonalMix = 0.5;
// Probability that a user's demographics follow the prototype's skew.
constexpr double kAgePeakProb = 0.55;
constexpr double kGenderPeakProb = 0.75;

std::vector<double> normalized(std::vector<double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  return v;
}

// Cumulative distribution over categories proportional to aff^(1/noise).
std::vector<double> tempered_cdf(const std::vector<double>& aff,
                                 double noise) {
  std::vector<double> cdf(aff.size());
  double acc = 0.0;
  for (std::size_t c = 0; c < aff.size(); ++c) {
    acc += std::pow(aff[c], 1.0 / noise);
    cdf[c] = acc;
  }
  return cdf;
}

int sample_category(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.unit() * cdf.back();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(it - cdf.begin()) + 1;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const int L = cfg.num_labels;
  const int P = cfg.n_prototypes;
  Rng rng(cfg.seed);

  struct Prototype {
    std::vector<double> base;  // category profile, sums to 1
    std::vector<int> remap;    // label category -> feature category
    int age_peak = 0;
    int gender_peak = 0;
  };
  std::vector<Prototype> protos(static_cast<std::size_t>(P));
  for (auto& proto : protos) {
    std::vector<int> cats(static_cast<std::size_t>(L));
    for (int c = 0; c < L; ++c) cats[c] = c + 1;
    rng.shuffle(cats);
    proto.base.assign(static_cast<std::size_t>(L), 0.0);
    for (int c = 0; c < L; ++c) {
      const bool favored = c < std::max(1, L / 2);
      proto.base[cats[c] - 1] =
          favored ? 1.0 + 0.5 * rng.unit() : 0.1 + 0.05 * rng.unit();
    }
    proto.base = normalized(std::move(proto.base));
    proto.remap.assign(cats.begin(), cats.end());
    rng.shuffle(proto.remap);
    proto.age_peak = static_cast<int>(rng.below(9));
    proto.gender_peak = static_cast<int>(rng.below(2));
  }

  const std::pair<EventGroup, double> kFeatureRates[] = {
      {EventGroup::kPv, kPvRate},   {EventGroup::kSq, kSqRate},
      {EventGroup::kSlc, kSlcRate}, {EventGroup::kOlc, kOlcRate},
      {EventGroup::kAdv, kAdvRate}};

  SyntheticData out;
  out.events.reserve(static_cast<std::size_t>(
      cfg.n_users * (kPvRate + kSqRate + kSlcRate + kOlcRate + kAdvRate +
                     kAdcRate)));
  for (int u = 0; u < cfg.n_users; ++u) {
    const std::int64_t user = u + 1;
    const Prototype& proto = protos[rng.below(static_cast<std::uint64_t>(P))];

    std::vector<double> personal(static_cast<std::size_t>(L));
    for (double& v : personal) v = rng.exponential();
    personal = normalized(std::move(personal));

    std::vector<double> feat_aff(static_cast<std::size_t>(L));
    for (int c = 0; c < L; ++c) {
      feat_aff[c] =
          (1.0 - kPersonalMix) * proto.base[c] + kPersonalMix * personal[c];
    }
    std::vector<double> label_aff(static_cast<std::size_t>(L));
    for (int c = 0; c < L; ++c) {
      label_aff[c] = feat_aff[proto.remap[c] - 1];
    }

    UserDemographics demo;
    demo.age_bucket = rng.unit() < kAgePeakProb
                          ? proto.age_peak
                          : static_cast<int>(rng.below(9));
    demo.gender = rng.unit() < kGenderPeakProb
                      ? proto.gender_peak
                      : static_cast<int>(rng.below(2));
    out.demographics[user] = demo;

    const std::vector<double> feat_cdf = tempered_cdf(feat_aff, cfg.noise);
    const std::vector<double> label_cdf = tempered_cdf(label_aff, cfg.noise);
    for (const auto& [group, rate] : kFeatureRates) {
      const int n = rng.poisson(rate);
      for (int e = 0; e < n; ++e) {
        EventTuple ev;
        ev.user = user;
        ev.group = group;
        ev.timestamp =
            static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cfg.horizon + 1)));
        ev.category = sample_category(feat_cdf, rng);
        out.events.push_back(ev);
      }
    }
    const int n_adc = rng.poisson(kAdcRate);
    for (int e = 0; e < n_adc; ++e) {
      EventTuple ev;
      ev.user = user;
      ev.group = EventGroup::kAdc;
      ev.timestamp =
          static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cfg.horizon + 1)));
      ev.category = sample_category(label_cdf, rng);
      out.events.push_back(ev);
    }
  }
  return out;
}

}  // namespace labelrank
