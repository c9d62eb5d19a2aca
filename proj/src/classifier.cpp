#include "nrc/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace nrc {

namespace {

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_net(std::ostream& out, const Mlp& net) {
  out << "layers " << net.layers().size();
  for (int l : net.layers()) out << ' ' << l;
  out << "\nparams " << net.param_count() << '\n';
  const auto p = net.params();
  for (std::size_t i = 0; i < p.size(); ++i) out << fmt(p[i]) << ((i % 8 == 7 || i + 1 == p.size()) ? '\n' : ' ');
}

class Reader {
 public:
  explicit Reader(std::string_view text) : in_(std::string(text)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw FormatError("classifier file ends unexpectedly");
    return w;
  }
  void expect(std::string_view keyword) {
    const auto w = word();
    if (w != keyword) throw FormatError("expected '" + std::string(keyword) + "', found '" + w + "'");
  }
  long integer() {
    const auto w = word();
    long v = 0;
    const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw FormatError("expected an integer, found '" + w + "'");
    return v;
  }
  double real() {
    const auto w = word();
    double v = 0;
    const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw FormatError("expected a number, found '" + w + "'");
    return v;
  }
  long keyed(std::string_view key) {
    const auto w = word();
    const std::string prefix = std::string(key) + "=";
    if (w.rfind(prefix, 0) != 0) throw FormatError("expected '" + prefix + "...', found '" + w + "'");
    long v = 0;
    const auto [p, ec] = std::from_chars(w.data() + prefix.size(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw FormatError("bad value in '" + w + "'");
    return v;
  }

 private:
  std::istringstream in_;
};

Mlp read_net(Reader& r) {
  r.expect("layers");
  const long count = r.integer();
  if (count < 2 || count > 16) throw FormatError("bad layer count");
  std::vector<int> layers(count);
  for (auto& l : layers) l = static_cast<int>(r.integer());
  Mlp net(layers);
  r.expect("params");
  if (r.integer() != static_cast<long>(net.param_count())) throw FormatError("parameter count does not match layers");
  for (double& p : net.params()) p = r.real();
  return net;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Simple: return "simple";
    case ClassifierKind::AdaBoost: return "adaboost";
    case ClassifierKind::WaldBoost: return "waldboost";
  }
  return "?";
}

ClassifierKind parse_classifier_kind(std::string_view text) {
  if (text == "simple") return ClassifierKind::Simple;
  if (text == "adaboost") return ClassifierKind::AdaBoost;
  if (text == "waldboost") return ClassifierKind::WaldBoost;
  throw std::invalid_argument("unknown classifier kind '" + std::string(text) + "'");
}

double Classifier::score(const Change& change, int s) const {
  switch (kind) {
    case ClassifierKind::Simple: {
      thread_local std::vector<double> buffer;
      buffer.resize(spec.size(static_cast<int>(change.before.size()), s));
      encode(spec, s, change.before, change.after, change.day, buffer);
      return net.forward(buffer);
    }
    case ClassifierKind::AdaBoost: return committee_classify(committee, change).score;
    case ClassifierKind::WaldBoost: return cascade_classify(committee, change).score;
  }
  return 0.5;
}

int Classifier::decide(const Change& change, int s) const {
  switch (kind) {
    case ClassifierKind::Simple: return score(change, s) > 0.5 ? 1 : -1;
    case ClassifierKind::AdaBoost: return committee_classify(committee, change).decision;
    case ClassifierKind::WaldBoost: return cascade_classify(committee, change).decision;
  }
  return -1;
}

int Classifier::input_size(int d, int s) const {
  if (kind == ClassifierKind::Simple) return spec.size(d, s);
  int total = 0;
  for (const auto& m : committee.members) total += m.spec.size(d, s);
  return total;
}

Classifier make_simple(const EncodingSpec& spec, int d, int s, std::vector<int> hidden, std::uint64_t seed) {
  Classifier c;
  c.kind = ClassifierKind::Simple;
  c.spec = spec;
  std::vector<int> layers = {spec.size(d, s)};
  layers.insert(layers.end(), hidden.begin(), hidden.end());
  layers.push_back(1);
  c.net = Mlp(layers);
  c.net.randomize(seed);
  return c;
}

const Classifier& ClassifierBank::for_group(std::string_view group) const {
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (groups[g] == group) return classifiers[g];
  throw DimensionMismatch("classifier file has no classifier for contract group '" + std::string(group) + "'");
}

void ClassifierBank::check_compatible(const ProblemInstance& instance) const {
  if (instance.d != d || instance.s != s)
    throw DimensionMismatch("classifier was trained for d=" + std::to_string(d) + " s=" + std::to_string(s) +
                            ", instance has d=" + std::to_string(instance.d) + " s=" + std::to_string(instance.s));
  for (const auto& g : instance.groups()) (void)for_group(g);
}

std::string ClassifierBank::serialize() const {
  std::ostringstream out;
  out << "nrc-classifier " << kVersion << '\n';
  out << "instance " << (instance_name.empty() ? "-" : instance_name) << '\n';
  out << "dims d=" << d << " s=" << s << " tau=" << tau << '\n';
  out << "groups " << groups.size() << '\n';
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& c = classifiers[g];
    out << "group " << groups[g] << ' ' << to_string(c.kind) << '\n';
    if (c.kind == ClassifierKind::Simple) {
      out << "encoding " << c.spec.tag() << '\n';
      write_net(out, c.net);
      continue;
    }
    out << "members " << c.committee.members.size() << '\n';
    for (std::size_t t = 0; t < c.committee.members.size(); ++t) {
      out << "member " << c.committee.members[t].spec.tag() << " alpha " << fmt(c.committee.alpha[t]) << '\n';
      write_net(out, c.committee.members[t].net);
    }
    out << "stages " << c.committee.stages.size() << '\n';
    for (const auto& st : c.committee.stages) out << fmt(st.reject) << ' ' << fmt(st.accept) << '\n';
  }
  out << "end\n";
  return out.str();
}

ClassifierBank ClassifierBank::parse(std::string_view text) {
  Reader r(text);
  r.expect("nrc-classifier");
  const long version = r.integer();
  if (version != kVersion)
    throw VersionError("classifier file version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kVersion) + ")");
  ClassifierBank bank;
  r.expect("instance");
  bank.instance_name = r.word();
  if (bank.instance_name == "-") bank.instance_name.clear();
  r.expect("dims");
  bank.d = static_cast<int>(r.keyed("d"));
  bank.s = static_cast<int>(r.keyed("s"));
  bank.tau = r.keyed("tau");
  if (bank.d < 1 || bank.s < 1) throw FormatError("bad classifier dimensions");
  r.expect("groups");
  const long groups = r.integer();
  for (long g = 0; g < groups; ++g) {
    r.expect("group");
    bank.groups.push_back(r.word());
    Classifier c;
    c.kind = parse_classifier_kind(r.word());
    if (c.kind == ClassifierKind::Simple) {
      r.expect("encoding");
      c.spec = EncodingSpec::parse_tag(r.word());
      c.net = read_net(r);
      if (c.net.inputs() != c.spec.size(bank.d, bank.s)) throw FormatError("network input does not match encoding");
    } else {
      c.committee.d = bank.d;
      c.committee.s = bank.s;
      r.expect("members");
      const long members = r.integer();
      for (long t = 0; t < members; ++t) {
        r.expect("member");
        WeakClassifier w;
        w.spec = EncodingSpec::parse_tag(r.word());
        r.expect("alpha");
        c.committee.alpha.push_back(r.real());
        w.net = read_net(r);
        if (w.net.inputs() != w.spec.size(bank.d, bank.s)) throw FormatError("member input does not match encoding");
        c.committee.members.push_back(std::move(w));
      }
      r.expect("stages");
      const long stages = r.integer();
      for (long t = 0; t < stages; ++t) {
        CascadeStage st;
        st.reject = r.real();
        st.accept = r.real();
        c.committee.stages.push_back(st);
      }
    }
    bank.classifiers.push_back(std::move(c));
  }
  r.expect("end");
  return bank;
}

void ClassifierBank::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize();
  if (!out) throw std::runtime_error("failed writing " + path);
}

ClassifierBank ClassifierBank::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

IncrementalNet::IncrementalNet(const Classifier& classifier, int d, int s) : c_(&classifier), d_(d), s_(s) {
  if (classifier.kind != ClassifierKind::Simple) throw std::invalid_argument("incremental scoring needs a simple classifier");
  const auto& spec = classifier.spec;
  width_ = spec.shifts == ShiftEncoding::Real ? 1 : spec.shifts == ShiftEncoding::Binary ? s : s + 1;
  length_ = spec.window > 0 ? spec.window : d;
  hidden_ = classifier.net.layers().at(1);
  inputs_ = classifier.net.inputs();
  if (inputs_ != spec.size(d, s)) throw DimensionMismatch("network input does not match encoding");
  after_cells_ = inputs_ / 2;
  after_features_ = spec.features ? after_cells_ + length_ * width_ : -1;
  sum_.resize(hidden_);
  after_row_.resize(d);
}

double IncrementalNet::cell_value(Shift c) const { return static_cast<double>(c) / s_; }

void IncrementalNet::prepare(std::span<const Shift> row) {
  row_.assign(row.begin(), row.end());
  const auto& spec = c_->spec;
  const int positions = spec.window > 0 ? d_ : 1;
  pre_.assign(static_cast<std::size_t>(positions) * hidden_, 0.0);
  std::vector<double> input(inputs_);
  // The before row encoded on both halves; the after half is patched per call.
  for (int p = 0; p < positions; ++p) {
    encode(spec, s_, row, row, p, input);
    if (after_features_ >= 0) std::fill(input.begin() + after_features_, input.end(), 0.0);
    const auto w = c_->net.params();
    const double* theta = w.data() + static_cast<std::size_t>(hidden_) * inputs_;
    for (int h = 0; h < hidden_; ++h) {
      const double* wh = w.data() + static_cast<std::size_t>(h) * inputs_;
      double acc = theta[h];
      for (int u = 0; u < inputs_; ++u) acc += wh[u] * input[u];
      pre_[static_cast<std::size_t>(p) * hidden_ + h] = acc;
    }
  }
  ready_ = true;
}

double IncrementalNet::score(std::span<const Shift> row_before, int day, Shift after) {
  if (!ready_ || !std::equal(row_before.begin(), row_before.end(), row_.begin(), row_.end())) prepare(row_before);
  const auto& spec = c_->spec;
  const int pos = spec.window > 0 ? day : 0;
  const int q = spec.window > 0 ? spec.window / 2 : day;
  const Shift before = row_before[day];
  const auto w = c_->net.params();
  std::copy_n(pre_.data() + static_cast<std::size_t>(pos) * hidden_, hidden_, sum_.data());

  const auto add_column = [&](int column, double value) {
    const double* wc = w.data() + column;
    for (int h = 0; h < hidden_; ++h) sum_[h] += wc[static_cast<std::size_t>(h) * inputs_] * value;
  };
  const int base = after_cells_ + q * width_;
  switch (spec.shifts) {
    case ShiftEncoding::Real: add_column(base, cell_value(after) - cell_value(before)); break;
    case ShiftEncoding::Binary:
      if (before != kDayOff) add_column(base + before - 1, -1.0);
      if (after != kDayOff) add_column(base + after - 1, 1.0);
      break;
    case ShiftEncoding::BinaryLiteral:
      if (before != kDayOff) add_column(base + before, -1.0);
      if (after != kDayOff) add_column(base + after, 1.0);
      break;
  }
  if (after_features_ >= 0) {
    std::copy(row_before.begin(), row_before.end(), after_row_.begin());
    after_row_[day] = after;
    const auto f = derived_features(after_row_, !spec.raw_features);
    for (int h = 0; h < hidden_; ++h) {
      const double* wh = w.data() + static_cast<std::size_t>(h) * inputs_ + after_features_;
      double acc = 0;
      for (int k = 0; k < kDerivedFeatures; ++k) acc += wh[k] * f[k];
      sum_[h] += acc;
    }
  }
  return c_->net.forward_from_first(sum_);
}

BankScorer::BankScorer(std::shared_ptr<const ClassifierBank> bank, const ProblemInstance& instance)
    : bank_(std::move(bank)), d_(instance.d) {
  bank_->check_compatible(instance);
  for (const auto& e : instance.employees) {
    by_employee_.push_back(&bank_->for_group(e.group));
    const Classifier& c = *by_employee_.back();
    incremental_.push_back(c.kind == ClassifierKind::Simple ? std::make_unique<IncrementalNet>(c, instance.d, instance.s)
                                                            : nullptr);
  }
}

double BankScorer::score(int employee, int day, std::span<const Shift> row_before, Shift after) const {
  if (incremental_[employee]) return incremental_[employee]->score(row_before, day, after);
  thread_local std::vector<Shift> row;
  row.assign(row_before.begin(), row_before.end());
  row[day] = after;
  return by_employee_[employee]->score({row_before, row, day}, bank_->s);
}

void BankScorer::check_compatible(const ProblemInstance& instance) const {
  bank_->check_compatible(instance);
  if (instance.n != static_cast<int>(by_employee_.size()) || instance.d != d_)
    throw DimensionMismatch("scorer was built for a different instance");
}

}  // namespace nrc
