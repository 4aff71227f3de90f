// Writes a small labelled corpus: word vectors, HTML pages and ground truth.
//
//   make_synthetic_corpus <out_dir> [--pages N] [--seed S]
//
// Content and boilerplate draw from disjoint vocabularies whose vectors sit
// around two separated centres. Pages put a title, a few navigation links and
// the headline first, so the leading blocks cover both classes. A teaser link
// per page is boilerplate written in content vocabulary. Distributions
// are implemented here rather than taken from <random> so the output does not
// depend on the standard library.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "boilerfield/dom.hpp"
#include "boilerfield/json_io.hpp"
#include "boilerfield/records.hpp"

namespace fs = std::filesystem;
using namespace boilerfield;

namespace {

constexpr int kDim = 16;

const std::vector<std::string> kContentWords = {
    "river",    "valley",   "harvest", "orchard",  "farmers", "rainfall", "drought",  "irrigation",
    "wheat",    "barley",   "soil",    "erosion",  "terrace", "village",  "cooperative", "yield",
    "season",   "climate",  "seedlings", "granary", "pasture", "herders", "migration", "canal",
    "reservoir", "monsoon", "crops",   "fertile",  "plateau", "upland",   "growers",  "planting",
    "tillage",  "compost",  "millet",  "sorghum",  "groundwater", "watershed", "agronomist", "livestock"};

const std::vector<std::string> kBoilerWords = {
    "home",     "login",    "subscribe", "newsletter", "privacy", "cookies",   "copyright", "contact",
    "menu",     "share",    "advertisement", "sponsored", "terms", "sitemap",  "careers",   "follow",
    "signup",   "account",  "settings",  "trending",   "popular", "archive",   "search",    "help",
    "feedback", "rss",      "facebook",  "twitter",    "instagram", "download", "app",      "deals",
    "offers",   "rights",   "reserved",  "policy",     "accessibility", "partners", "advertise", "podcast"};

const std::vector<std::string> kStopWords = {"the", "and", "of", "in", "to", "a", "for", "on", "with", "our"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, n) by rejection.
  std::size_t index(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
  }

  std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }

 private:
  std::mt19937_64 gen_;
  std::optional<double> spare_;
};

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

// A sentence of `words` vocabulary words with stop words mixed in.
std::string sentence(Rng& rng, const std::vector<std::string>& vocab, std::size_t words, bool period) {
  std::string out;
  for (std::size_t k = 0; k < words; ++k) {
    if (!out.empty()) out += ' ';
    if (k > 0 && rng.uniform() < 0.3) out += kStopWords[rng.index(kStopWords.size())] + ' ';
    out += vocab[rng.index(vocab.size())];
  }
  out = capitalize(out);
  if (period) out += '.';
  return out;
}

struct Page {
  std::string html;
  std::map<std::string, int> labels;  // normalized block text -> label
};

Page make_page(Rng& rng, std::size_t page_no) {
  Page page;
  std::map<std::string, int>& labels = page.labels;
  const auto text = [&](const std::vector<std::string>& vocab, std::size_t lo, std::size_t hi, bool period,
                        int label) {
    std::string s;
    do {
      s = sentence(rng, vocab, rng.between(lo, hi), period);
    } while (labels.contains(s));
    labels[s] = label;
    return s;
  };

  std::string h = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  h += "<title>" + text(kContentWords, 4, 6, false, 1) + "</title>\n";
  h += "<style>body { font-family: serif; }</style>\n</head>\n<body>\n";
  h += "<header class=\"site-header\">\n<nav>\n<ul>\n";
  const std::size_t nav = rng.between(3, 4);
  for (std::size_t k = 0; k < nav; ++k) h += "<li><a href=\"/s" + std::to_string(k) + "\">" + text(kBoilerWords, 1, 2, false, 0) + "</a></li>\n";
  h += "</ul>\n</nav>\n</header>\n<main>\n<article>\n";
  h += "<h1>" + text(kContentWords, 5, 8, false, 1) + "</h1>\n";
  h += "<p class=\"lead\">" + text(kContentWords, 12, 18, true, 1) + "</p>\n";

  const std::size_t paragraphs = rng.between(15, 19);
  for (std::size_t k = 0; k < paragraphs; ++k) {
    if (k > 0 && k % 6 == 0) h += "<h2>" + text(kContentWords, 3, 6, false, 1) + "</h2>\n";
    h += "<p>" + text(kContentWords, 10, 22, true, 1) + "</p>\n";
  }
  h += "</article>\n<aside class=\"sidebar\">\n";
  const std::size_t side = rng.between(2, 3);
  for (std::size_t k = 0; k < side; ++k) h += "<div class=\"widget\">" + text(kBoilerWords, 3, 6, false, 0) + "</div>\n";
  // Teaser links mix both vocabularies; they are boilerplate but embed near
  // the content cluster.
  std::string teaser;
  do {
    teaser = "Related " + sentence(rng, kContentWords, rng.between(2, 3), false) + " " +
             sentence(rng, kBoilerWords, 1, false);
  } while (labels.contains(teaser));
  labels[teaser] = 0;
  h += "<div class=\"related\"><a href=\"/r\">" + teaser + "</a></div>\n";
  h += "</aside>\n</main>\n<footer>\n";
  const std::size_t foot = rng.between(2, 3);
  for (std::size_t k = 0; k < foot; ++k) h += "<p>" + text(kBoilerWords, 3, 7, true, 0) + "</p>\n";
  h += "</footer>\n<script>var page = " + std::to_string(page_no) + ";</script>\n</body>\n</html>\n";
  page.html = std::move(h);
  return page;
}

void write_vectors(Rng& rng, std::ostream& out) {
  std::vector<double> content(kDim), boiler(kDim);
  for (int d = 0; d < kDim; ++d) {
    content[d] = (d % 2 == 0) ? 0.5 : -0.5;
    boiler[d] = -content[d];
  }
  const auto emit = [&](const std::string& word, const std::vector<double>& centre, double spread) {
    out << word;
    char buf[32];
    for (int d = 0; d < kDim; ++d) {
      std::snprintf(buf, sizeof buf, " %.6f", centre[d] + spread * rng.normal());
      out << buf;
    }
    out << '\n';
  };
  for (const auto& w : kContentWords) emit(w, content, 0.5);
  for (const auto& w : kBoilerWords) emit(w, boiler, 0.5);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_synthetic_corpus <out_dir> [--pages N] [--seed S]\n";
    return 1;
  }
  const fs::path out = argv[1];
  std::size_t pages = 10;
  std::uint64_t seed = 20240601;
  for (int k = 2; k + 1 < argc; k += 2) {
    const std::string flag = argv[k];
    if (flag == "--pages") {
      pages = std::stoul(argv[k + 1]);
    } else if (flag == "--seed") {
      seed = std::stoull(argv[k + 1]);
    } else {
      std::cerr << "unknown flag " << flag << "\n";
      return 1;
    }
  }

  Rng rng(seed);
  fs::create_directories(out / "pages");
  fs::create_directories(out / "truth");
  {
    std::ofstream vec(out / "embeddings.txt", std::ios::binary);
    write_vectors(rng, vec);
  }

  for (std::size_t p = 1; p <= pages; ++p) {
    char id_buf[16];
    std::snprintf(id_buf, sizeof id_buf, "page%02zu", p);
    const std::string id = id_buf;
    const Page page = make_page(rng, p);
    write_file_atomic(out / "pages" / (id + ".html"), page.html);

    GroundTruthPage truth;
    truth.page_id = id;
    for (const auto& block : extract_text_blocks(page.html)) {
      const auto it = page.labels.find(block.text);
      if (it == page.labels.end()) {
        std::cerr << id << ": unexpected block '" << block.text << "'\n";
        return 2;
      }
      truth.blocks.push_back({block.dom_path, block.text_hash, it->second});
    }
    write_file_atomic(out / "truth" / (id + ".json"), dump_stable(to_json(truth)));
  }
  return 0;
}
