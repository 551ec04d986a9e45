#include "mmdb/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "mmdb/error.hpp"
#include "mmdb/hash.hpp"
#include "mmdb/tokenizer.hpp"

namespace mmdb {

namespace {

// Uniform double in [0, 1) from the top 53 bits, identical on every
// platform that pins mt19937_64 (all of them, per the standard).
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

size_t pick_index(std::mt19937_64& rng, size_t n) { return rng() % n; }

const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
  return pool[pick_index(rng, pool.size())];
}

bool chance(std::mt19937_64& rng, double p) { return unit_draw(rng) < p; }

// Appends a sentence to `text`, replacing each "{}" with the next value and
// returning the character range of every inserted value. A space joins
// consecutive sentences.
std::vector<CharRange> emit_sentence(std::string& text, const std::string& tmpl,
                                     const std::vector<std::string>& values) {
  if (!text.empty()) text += ' ';
  std::vector<CharRange> ranges;
  size_t pos = 0;
  size_t vi = 0;
  while (true) {
    size_t ph = tmpl.find("{}", pos);
    if (ph == std::string::npos) {
      text.append(tmpl, pos, std::string::npos);
      break;
    }
    text.append(tmpl, pos, ph - pos);
    const std::string& v = values.at(vi++);
    ranges.push_back(CharRange{text.size(), text.size() + v.size()});
    text += v;
    pos = ph + 2;
  }
  return ranges;
}

const std::vector<std::string> kKeyTemplates = {
    "The patient was diagnosed with {} during the visit.",
    "An examination confirmed {} shortly after admission.",
    "Clinical tests pointed to {} in this case.",
};

// Treatment sentences re-mention the key; `key_first` records which
// placeholder holds the key surface.
struct TreatTemplate {
  const char* tmpl;
  bool key_first;
};

const std::vector<TreatTemplate> kTreatTemplates = {
    {"The doctor prescribed {} to treat {}.", false},
    {"For {} the recommended course was {}.", true},
    {"Management of {} relied on {}.", true},
};

const std::vector<std::string> kSymptomTemplates = {
    "The chart noted {} as the presenting complaint.",
    "Persistent {} was recorded before the exam.",
    "Staff observed {} throughout the stay.",
};

const std::vector<std::string> kVisitTemplates = {
    "{} visited the clinic on {}.",
    "{} was seen by the duty physician on {}.",
    "The appointment for {} took place on {}.",
};

const std::vector<std::string> kFindingTemplates = {
    "The record lists {} as the final finding.",
    "Assessment at discharge produced {}.",
    "The consultation closed with {} noted.",
};

const std::vector<std::string> kRementionTemplates = {
    "Earlier notes referred to {} as well.",
    "A previous entry already mentioned {}.",
};

const std::vector<std::string> kDoctorTemplates = {
    "{} led the consultation that morning.",
    "The case was reviewed by {} on rounds.",
};

const std::vector<std::string> kSpecialtyTemplates = {
    "The referral fell under {} at this hospital.",
    "Records route the case through {}.",
};

struct EntityFacts {
  std::string diagnosis;
  std::string alias;
  std::string treatment;
  std::string symptom;
};

EntityFacts facts_for(const Vocabulary& vocab, const std::string& diagnosis) {
  EntityFacts f;
  f.diagnosis = diagnosis;
  auto a = vocab.alias_of.find(diagnosis);
  f.alias = a == vocab.alias_of.end() ? diagnosis : a->second;
  auto t = vocab.treatment_of.find(diagnosis);
  if (t == vocab.treatment_of.end())
    throw ConfigError("vocabulary lacks a treatment for '" + diagnosis + "'");
  f.treatment = t->second;
  auto s = vocab.symptom_of.find(diagnosis);
  if (s == vocab.symptom_of.end())
    throw ConfigError("vocabulary lacks a symptom for '" + diagnosis + "'");
  f.symptom = s->second;
  return f;
}

// Distinct diagnoses for one document.
std::vector<std::string> sample_diagnoses(std::mt19937_64& rng,
                                          const std::vector<std::string>& pool,
                                          size_t count) {
  std::vector<size_t> idx(pool.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (size_t i = 0; i < count; ++i) {
    size_t j = i + pick_index(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::string> out;
  for (size_t i = 0; i < count; ++i) out.push_back(pool[idx[i]]);
  return out;
}

std::string sampled_name(std::mt19937_64& rng, const Vocabulary& vocab) {
  return pick(rng, vocab.first_names) + " " + pick(rng, vocab.last_names);
}

std::string sampled_date(std::mt19937_64& rng) {
  int day = 1 + static_cast<int>(rng() % 28);
  int month = 1 + static_cast<int>(rng() % 12);
  int year = 1990 + static_cast<int>(rng() % 20);
  return std::to_string(day) + "." + std::to_string(month) + "." +
         std::to_string(year);
}

void validate_config(const GeneratorConfig& cfg) {
  if (cfg.num_docs <= 0) throw ConfigError("num_docs must be positive");
  if (cfg.max_entities < 1) throw ConfigError("max_entities must be at least 1");
  if (cfg.dependent_columns < 1 || cfg.dependent_columns > 2)
    throw ConfigError("dependent_columns must be 1 or 2");
  for (double p : {cfg.concat_prob, cfg.alias_prob, cfg.distractor_prob})
    if (p < 0.0 || p > 1.0) throw ConfigError("probabilities must lie in [0, 1]");
  if (cfg.vocab.diagnoses.empty()) throw ConfigError("vocabulary has no diagnoses");
  if (cfg.vocab.first_names.empty() || cfg.vocab.last_names.empty())
    throw ConfigError("vocabulary has no names");
  if (cfg.kind == TableKind::MultiTable && cfg.vocab.specialties.empty())
    throw ConfigError("vocabulary has no specialties");
  if (cfg.vocab.distractors.empty())
    throw ConfigError("vocabulary has no distractor sentences");
}

}  // namespace

Vocabulary default_vocabulary() {
  Vocabulary v;
  // diagnosis, alias, treatment, symptom. Surfaces are lowercase so planted
  // values never collide with sentence-initial capitalization.
  const char* table[][4] = {
      {"fever", "high body temperature", "aspirin", "sweating"},
      {"sore throat", "pharyngitis", "lozenges", "hoarseness"},
      {"migraine", "chronic headache", "ibuprofen", "nausea"},
      {"influenza", "seasonal flu", "oseltamivir", "chills"},
      {"bronchitis", "chest cold", "codeine", "coughing"},
      {"asthma", "airway disease", "albuterol", "wheezing"},
      {"pneumonia", "lung infection", "amoxicillin", "fatigue"},
      {"sinusitis", "sinus infection", "decongestant", "congestion"},
      {"tonsillitis", "swollen tonsils", "penicillin", "swallowing pain"},
      {"measles", "rubeola", "acetaminophen", "skin rash"},
      {"chickenpox", "varicella", "calamine", "itching"},
      {"diabetes", "high blood sugar", "insulin", "thirst"},
      {"hypertension", "elevated blood pressure", "lisinopril", "dizziness"},
      {"anemia", "low iron count", "ferrous sulfate", "weakness"},
      {"arthritis", "joint inflammation", "naproxen", "stiffness"},
      {"dermatitis", "irritated skin", "hydrocortisone", "scaling"},
      {"gastritis", "stomach inflammation", "antacids", "heartburn"},
      {"vertigo", "spinning sensation", "meclizine", "imbalance"},
      {"eczema", "dry itchy patches", "moisturizer", "flaking"},
      {"insomnia", "sleep disorder", "melatonin", "restlessness"},
  };
  for (const auto& row : table) {
    v.diagnoses.push_back(row[0]);
    v.alias_of[row[0]] = row[1];
    v.treatment_of[row[0]] = row[2];
    v.symptom_of[row[0]] = row[3];
  }
  v.first_names = {"Alice", "Bob", "Carol", "David", "Emma", "Frank",
                   "Grace", "Henry", "Irene", "Jack", "Karen", "Louis"};
  v.last_names = {"Jones", "Smith", "Chen", "Patel", "Garcia", "Miller",
                  "Davis", "Brown", "Wilson", "Taylor", "Moore", "Anderson"};
  v.specialties = {"cardiology", "neurology", "pediatrics", "oncology",
                   "radiology", "dermatology", "orthopedics", "psychiatry"};
  v.distractors = {
      "The ward was unusually quiet that afternoon.",
      "A follow up appointment was arranged by phone.",
      "Administrative notes were attached to the file.",
      "The intake form had been filled out in advance.",
      "Parking validation was handled at the front desk.",
  };
  v.column_aliases = {
      {"diagnosis", {"diagnosis", "condition", "illness", "ailment"}},
      {"treatment", {"treatment", "medication", "prescription", "remedy"}},
      {"symptom", {"symptom", "complaint", "presentation"}},
      {"patient", {"patient", "patient name"}},
      {"date", {"date", "visit date"}},
      {"doctor", {"doctor", "physician", "attending"}},
      {"specialty", {"specialty", "field", "department"}},
  };
  return v;
}

GeneratedCorpus generate_corpus(const GeneratorConfig& cfg) {
  validate_config(cfg);

  std::mt19937_64 corpus_rng(hash_mix(cfg.seed, fnv1a64("corpus")));
  auto column_name = [&](const std::string& logical) {
    auto it = cfg.vocab.column_aliases.find(logical);
    if (it == cfg.vocab.column_aliases.end() || it->second.empty())
      return logical;
    if (!cfg.randomize_column_names) return it->second.front();
    return pick(corpus_rng, it->second);
  };

  // Column surfaces are fixed once per corpus so one definition describes
  // every document.
  std::map<std::string, std::string> names;
  for (const char* logical : {"diagnosis", "treatment", "symptom", "patient",
                              "date", "doctor", "specialty"})
    names[logical] = column_name(logical);

  GeneratedCorpus out;
  out.collection.name = "notes";
  TextTableDef& def = out.def;
  def.collection = "notes";
  def.kind = cfg.kind;

  switch (cfg.kind) {
    case TableKind::SingleRow:
      def.name = "visits";
      def.columns = {{names["patient"], Dtype::Text, false, ""},
                     {names["diagnosis"], Dtype::Text, false, ""},
                     {names["date"], Dtype::Date, false, ""}};
      break;
    case TableKind::MultiRow:
      def.name = "examinations";
      def.columns = {{names["diagnosis"], Dtype::Text, true, ""}};
      def.columns.push_back({names["treatment"], Dtype::Text, false, ""});
      if (cfg.dependent_columns >= 2)
        def.columns.push_back({names["symptom"], Dtype::Text, false, ""});
      def.identifying_attrs = {names["diagnosis"]};
      break;
    case TableKind::MultiTable:
      def.name = "report";
      def.columns = {
          {names["diagnosis"], Dtype::Text, true, "examination"},
          {names["treatment"], Dtype::Text, false, "examination"},
          {names["doctor"], Dtype::Text, true, "physician"},
          {names["specialty"], Dtype::Text, false, "physician"},
      };
      def.identifying_attrs = {names["diagnosis"], names["doctor"]};
      break;
  }
  validate_def(def);

  for (int i = 0; i < cfg.num_docs; ++i) {
    std::mt19937_64 rng(hash_mix(hash_mix(cfg.seed, 0xd0c5), static_cast<uint64_t>(i)));
    Document doc;
    doc.id = "n" + std::to_string(i);
    GoldAnnotation g;
    g.doc_id = doc.id;
    std::string text;

    auto maybe_distract = [&]() {
      if (chance(rng, cfg.distractor_prob))
        emit_sentence(text, pick(rng, cfg.vocab.distractors), {});
    };

    if (cfg.kind == TableKind::SingleRow) {
      std::string name = sampled_name(rng, cfg.vocab);
      std::string date = sampled_date(rng);
      EntityFacts f = facts_for(cfg.vocab, pick(rng, cfg.vocab.diagnoses));

      maybe_distract();
      auto r1 = emit_sentence(text, pick(rng, kVisitTemplates), {name, date});
      g.spans[names["patient"]].push_back(r1[0]);
      g.spans[names["date"]].push_back(r1[1]);
      maybe_distract();
      auto r2 = emit_sentence(text, pick(rng, kFindingTemplates), {f.diagnosis});
      g.spans[names["diagnosis"]].push_back(r2[0]);
      if (chance(rng, cfg.alias_prob)) {
        auto r3 = emit_sentence(text, pick(rng, kRementionTemplates), {f.alias});
        g.spans[names["diagnosis"]].push_back(r3[0]);
        g.dup_groups.push_back({r2[0], r3[0]});
      }
      maybe_distract();

      GoldRow row;
      row.cells[names["patient"]] = name;
      row.cells[names["diagnosis"]] = f.diagnosis;
      row.cells[names["date"]] = date;
      g.tables[def.name].push_back(row);
    } else {
      // Shared by the multi-row def and the examination member of the
      // multi-table def.
      size_t n_entities = 1;
      if (cfg.max_entities > 1 && chance(rng, cfg.concat_prob))
        n_entities = 2 + pick_index(rng, static_cast<size_t>(cfg.max_entities - 1));

      std::string exam_table =
          cfg.kind == TableKind::MultiTable ? "examination" : def.name;
      std::string diag_key = cfg.kind == TableKind::MultiTable
                                 ? exam_table + "." + names["diagnosis"]
                                 : names["diagnosis"];
      std::string treat_key = cfg.kind == TableKind::MultiTable
                                  ? exam_table + "." + names["treatment"]
                                  : names["treatment"];
      std::string sympt_key = names["symptom"];

      if (cfg.kind == TableKind::MultiTable) {
        std::string doctor = sampled_name(rng, cfg.vocab);
        std::string spec = pick(rng, cfg.vocab.specialties);
        auto rd = emit_sentence(text, pick(rng, kDoctorTemplates), {doctor});
        g.spans["physician." + names["doctor"]].push_back(rd[0]);
        auto rs = emit_sentence(text, pick(rng, kSpecialtyTemplates), {spec});
        g.spans["physician." + names["specialty"]].push_back(rs[0]);
        GoldRow prow;
        prow.cells[names["doctor"]] = doctor;
        prow.cells[names["specialty"]] = spec;
        g.tables["physician"].push_back(prow);
      }

      auto picked = sample_diagnoses(rng, cfg.vocab.diagnoses, n_entities);
      for (const auto& d : picked) {
        EntityFacts f = facts_for(cfg.vocab, d);
        maybe_distract();

        auto r1 = emit_sentence(text, pick(rng, kKeyTemplates), {f.diagnosis});
        g.spans[diag_key].push_back(r1[0]);

        bool alias = chance(rng, cfg.alias_prob);
        const std::string& key_surface = alias ? f.alias : f.diagnosis;
        const auto& tt = kTreatTemplates[pick_index(rng, kTreatTemplates.size())];
        std::vector<std::string> vals =
            tt.key_first ? std::vector<std::string>{key_surface, f.treatment}
                         : std::vector<std::string>{f.treatment, key_surface};
        auto r2 = emit_sentence(text, tt.tmpl, vals);
        CharRange key_range = tt.key_first ? r2[0] : r2[1];
        CharRange treat_range = tt.key_first ? r2[1] : r2[0];
        g.spans[diag_key].push_back(key_range);
        g.spans[treat_key].push_back(treat_range);
        g.dup_groups.push_back({r1[0], key_range});

        GoldRow row;
        row.cells[names["diagnosis"]] = f.diagnosis;
        row.cells[names["treatment"]] = f.treatment;
        if (cfg.kind == TableKind::MultiRow && cfg.dependent_columns >= 2) {
          auto r3 = emit_sentence(text, pick(rng, kSymptomTemplates), {f.symptom});
          g.spans[sympt_key].push_back(r3[0]);
          row.cells[names["symptom"]] = f.symptom;
        }
        g.tables[exam_table].push_back(row);
      }
      maybe_distract();
    }

    doc.text = text;
    doc.tokens = tokenize(text);
    out.collection.documents.push_back(std::move(doc));
    out.gold.push_back(std::move(g));
  }
  return out;
}

SplitResult split(const TextCollection& corpus, double train_frac,
                  double dev_frac, double test_frac, uint64_t seed) {
  for (double f : {train_frac, dev_frac, test_frac})
    if (f < 0.0 || f > 1.0)
      throw InvalidArgument("split fractions must lie in [0, 1]");
  if (std::abs(train_frac + dev_frac + test_frac - 1.0) > 1e-9)
    throw InvalidArgument("split fractions must sum to 1");

  const size_t n = corpus.documents.size();
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(hash_mix(seed, fnv1a64("split")));
  for (size_t i = 0; i + 1 < n; ++i) {
    size_t j = i + rng() % (n - i);
    std::swap(idx[i], idx[j]);
  }

  size_t n_dev = static_cast<size_t>(dev_frac * static_cast<double>(n));
  size_t n_test = static_cast<size_t>(test_frac * static_cast<double>(n));
  size_t n_train = n - n_dev - n_test;

  auto take = [&](size_t begin, size_t count, const std::string& suffix) {
    std::vector<size_t> part(idx.begin() + static_cast<long>(begin),
                             idx.begin() + static_cast<long>(begin + count));
    std::sort(part.begin(), part.end());
    TextCollection c;
    c.name = corpus.name + suffix;
    for (size_t k : part) c.documents.push_back(corpus.documents[k]);
    return c;
  };

  SplitResult out;
  out.train = take(0, n_train, "_train");
  out.dev = take(n_train, n_dev, "_dev");
  out.test = take(n_train + n_dev, n_test, "_test");
  return out;
}

std::vector<GoldAnnotation> gold_subset(const std::vector<GoldAnnotation>& gold,
                                        const TextCollection& part) {
  std::set<std::string> ids;
  for (const auto& d : part.documents) ids.insert(d.id);
  std::vector<GoldAnnotation> out;
  for (const auto& g : gold)
    if (ids.count(g.doc_id)) out.push_back(g);
  return out;
}

JoinCorpus generate_join_corpus(uint64_t seed, int num_rows) {
  if (num_rows <= 0) throw ConfigError("num_rows must be positive");
  Vocabulary vocab = default_vocabulary();
  if (static_cast<size_t>(num_rows) >
      vocab.first_names.size() * vocab.last_names.size())
    throw ConfigError("num_rows exceeds the distinct name pool");

  std::mt19937_64 rng(hash_mix(seed, fnv1a64("join")));

  JoinCorpus out;
  out.collection.name = "patient_notes";
  out.def.name = "patient_reports";
  out.def.collection = out.collection.name;
  out.def.kind = TableKind::SingleRow;
  out.def.columns = {{"diagnosis", Dtype::Text, false, ""}};
  validate_def(out.def);

  out.table.name = "patients";
  out.table.key_cols = {"name"};
  out.table.table.schema = {{"name", Dtype::Text, true, ""},
                            {"age", Dtype::Number, false, ""}};

  out.link.name = "patients_notes";

  std::set<std::string> used_names;
  for (int i = 0; i < num_rows; ++i) {
    std::string name;
    do {
      name = sampled_name(rng, vocab);
    } while (!used_names.insert(name).second);
    std::string age = std::to_string(25 + rng() % 60);
    EntityFacts f = facts_for(vocab, pick(rng, vocab.diagnoses));

    Row row;
    row["name"] = CellValue{name, {}, {}};
    row["age"] = CellValue{age, {}, {}};
    out.table.table.rows.push_back(std::move(row));

    Document doc;
    doc.id = "jd" + std::to_string(i);
    std::string text;
    emit_sentence(text, "{} came in complaining about {}.", {name, f.symptom});
    auto r = emit_sentence(text, "The doctor diagnosed {} and prescribed {}.",
                           {f.diagnosis, f.treatment});
    doc.text = text;
    doc.tokens = tokenize(text);

    GoldAnnotation g;
    g.doc_id = doc.id;
    g.spans["diagnosis"].push_back(r[0]);
    GoldRow grow;
    grow.cells["diagnosis"] = f.diagnosis;
    g.tables[out.def.name].push_back(grow);
    out.gold.push_back(std::move(g));
    out.collection.documents.push_back(std::move(doc));

    out.link.entries.push_back({{name}, {"jd" + std::to_string(i)}});
  }
  return out;
}

}  // namespace mmdb
