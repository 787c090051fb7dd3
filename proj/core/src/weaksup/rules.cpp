// Copyright 2026 The cnat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cnat/weaksup/rules.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "cnat/data/parallel.hpp"
#include "cnat/data/vocab.hpp"
#include "cnat/error.hpp"

namespace cnat::weaksup {

enum class Segment { kA, kB, kAny };

struct Rule::Node {
  enum class Kind { kHas, kSubstr, kSubset, kWindow, kNot, kAnd, kOr } kind;
  std::vector<std::string> words;
  std::string text;
  Segment seg = Segment::kAny;
  Segment other = Segment::kAny;
  int k = 0;
  std::vector<std::shared_ptr<const Node>> children;
};

namespace {

using Node = Rule::Node;

struct Token {
  enum class Kind { kIdent, kString, kNumber, kPunct, kEnd } kind;
  std::string text;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto bad = [&](const std::string& what) {
    raise(ErrorCode::kBadRule, what + " at offset " + std::to_string(i) + " in '" + src + "'");
  };
  while (i < src.size()) {
    const unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (c == '"') {
      const auto end = src.find('"', i + 1);
      if (end == std::string::npos) bad("unterminated string");
      out.push_back({Token::Kind::kString, src.substr(i + 1, end - i - 1)});
      i = end + 1;
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Token::Kind::kNumber, src.substr(i, j - i)});
      i = j;
    } else if (std::string_view("(),|").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Token::Kind::kPunct, std::string(1, static_cast<char>(c))});
      ++i;
    } else if (std::isalpha(c) || c == '<' || c == '_' || c == '\'') {
      std::size_t j = i;
      while (j < src.size()) {
        const unsigned char d = static_cast<unsigned char>(src[j]);
        if (!(std::isalnum(d) || d == '_' || d == '<' || d == '>' || d == '\'' || d == '-')) break;
        ++j;
      }
      std::string word = src.substr(i, j - i);
      std::transform(word.begin(), word.end(), word.begin(), [](unsigned char ch) { return std::tolower(ch); });
      out.push_back({Token::Kind::kIdent, word});
      i = j;
    } else {
      bad(std::string("unexpected character '") + static_cast<char>(c) + "'");
    }
  }
  out.push_back({Token::Kind::kEnd, ""});
  return out;
}

class Parser {
 public:
  Parser(const std::string& src, std::vector<std::string>& keywords)
      : src_(src), tokens_(lex(src)), keywords_(keywords) {}

  std::shared_ptr<const Node> parse() {
    auto root = expr();
    if (peek().kind != Token::Kind::kEnd) fail("trailing input '" + peek().text + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { raise(ErrorCode::kBadRule, what + " in rule '" + src_ + "'"); }
  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }
  bool accept_punct(char c) {
    if (peek().kind == Token::Kind::kPunct && peek().text[0] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_punct(char c) {
    if (!accept_punct(c)) fail(std::string("expected '") + c + "'");
  }
  bool accept_ident(const char* word) {
    if (peek().kind == Token::Kind::kIdent && peek().text == word) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::shared_ptr<const Node> binary(Node::Kind kind, const char* op, std::shared_ptr<const Node> (Parser::*sub)()) {
    auto left = (this->*sub)();
    if (peek().kind != Token::Kind::kIdent || peek().text != op) return left;
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->children.push_back(left);
    while (accept_ident(op)) node->children.push_back((this->*sub)());
    return node;
  }
  std::shared_ptr<const Node> expr() { return binary(Node::Kind::kOr, "or", &Parser::term); }
  std::shared_ptr<const Node> term() { return binary(Node::Kind::kAnd, "and", &Parser::factor); }

  std::shared_ptr<const Node> factor() {
    if (accept_ident("not")) {
      auto node = std::make_shared<Node>();
      node->kind = Node::Kind::kNot;
      node->children.push_back(factor());
      return node;
    }
    if (accept_punct('(')) {
      auto inner = expr();
      expect_punct(')');
      return inner;
    }
    return atom();
  }

  Segment segment() {
    const auto t = next();
    if (t.kind == Token::Kind::kIdent) {
      if (t.text == "a") return Segment::kA;
      if (t.text == "b") return Segment::kB;
      if (t.text == "any") return Segment::kAny;
    }
    fail("expected segment a, b or any, got '" + t.text + "'");
  }

  std::vector<std::string> words() {
    std::vector<std::string> out;
    do {
      const auto t = next();
      if (t.kind != Token::Kind::kIdent && t.kind != Token::Kind::kNumber) fail("expected a word, got '" + t.text + "'");
      out.push_back(t.text);
      keywords_.push_back(t.text);
    } while (accept_punct('|'));
    return out;
  }

  std::shared_ptr<const Node> atom() {
    const auto head = next();
    if (head.kind != Token::Kind::kIdent) fail("expected a predicate, got '" + head.text + "'");
    auto node = std::make_shared<Node>();
    expect_punct('(');
    if (head.text == "has") {
      node->kind = Node::Kind::kHas;
      node->words = words();
      if (accept_punct(',')) node->seg = segment();
    } else if (head.text == "substr") {
      node->kind = Node::Kind::kSubstr;
      const auto t = next();
      if (t.kind != Token::Kind::kString || t.text.empty()) fail("substr() needs a nonempty quoted string");
      node->text = t.text;
      std::transform(node->text.begin(), node->text.end(), node->text.begin(),
                     [](unsigned char ch) { return std::tolower(ch); });
      if (accept_punct(',')) node->seg = segment();
    } else if (head.text == "subset") {
      node->kind = Node::Kind::kSubset;
      node->seg = segment();
      expect_punct(',');
      node->other = segment();
    } else if (head.text == "window") {
      node->kind = Node::Kind::kWindow;
      node->words = words();
      expect_punct(',');
      const auto t = next();
      if (t.kind != Token::Kind::kNumber) fail("window() needs a token distance");
      node->k = std::stoi(t.text);
    } else {
      fail("unknown predicate '" + head.text + "'");
    }
    expect_punct(')');
    return node;
  }

  std::string src_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string>& keywords_;
};

struct View {
  std::vector<std::string> a, b;
  std::string raw_a, raw_b;
};

View make_view(const data::Example& ex) {
  View v;
  v.a = data::tokenize_words(ex.segment_a);
  if (ex.segment_b) v.b = data::tokenize_words(*ex.segment_b);
  auto norm = [](const std::vector<std::string>& words) {
    std::string s;
    for (const auto& w : words) {
      if (!s.empty()) s += ' ';
      s += w;
    }
    return s;
  };
  v.raw_a = norm(v.a);
  v.raw_b = norm(v.b);
  return v;
}

// Positions of the names that follow the first two "<e>" markers of a.
std::optional<std::pair<int, int>> marked_names(const std::vector<std::string>& tokens) {
  std::vector<int> names;
  for (std::size_t i = 0; i + 1 < tokens.size() && names.size() < 2; ++i) {
    if (tokens[i] == "<e>" && tokens[i + 1] != "<e>") names.push_back(static_cast<int>(i + 1));
  }
  if (names.size() < 2) return std::nullopt;
  return std::make_pair(names[0], names[1]);
}

bool contains(const std::vector<std::string>& words, const std::string& w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

bool eval(const Node& n, const View& v) {
  auto segs = [&](Segment s) {
    std::vector<const std::vector<std::string>*> out;
    if (s != Segment::kB) out.push_back(&v.a);
    if (s != Segment::kA) out.push_back(&v.b);
    return out;
  };
  switch (n.kind) {
    case Node::Kind::kHas:
      for (const auto* seg : segs(n.seg)) {
        for (const auto& w : n.words) {
          if (contains(*seg, w)) return true;
        }
      }
      return false;
    case Node::Kind::kSubstr:
      if (n.seg != Segment::kB && v.raw_a.find(n.text) != std::string::npos) return true;
      if (n.seg != Segment::kA && v.raw_b.find(n.text) != std::string::npos) return true;
      return false;
    case Node::Kind::kSubset: {
      const auto& x = n.seg == Segment::kB ? v.b : v.a;
      const auto& y = n.other == Segment::kB ? v.b : v.a;
      if (x.empty()) return false;
      const std::set<std::string> have(y.begin(), y.end());
      return std::all_of(x.begin(), x.end(), [&](const std::string& w) { return have.contains(w); });
    }
    case Node::Kind::kWindow: {
      const auto names = marked_names(v.a);
      if (!names) return false;
      int gap = 0;
      bool hit = false;
      for (int i = names->first + 1; i < names->second; ++i) {
        const auto& w = v.a[static_cast<std::size_t>(i)];
        if (w == "<e>") continue;
        ++gap;
        if (contains(n.words, w)) hit = true;
      }
      return hit && gap <= n.k;
    }
    case Node::Kind::kNot:
      return !eval(*n.children[0], v);
    case Node::Kind::kAnd:
      return std::all_of(n.children.begin(), n.children.end(), [&](const auto& c) { return eval(*c, v); });
    case Node::Kind::kOr:
      return std::any_of(n.children.begin(), n.children.end(), [&](const auto& c) { return eval(*c, v); });
  }
  return false;
}

const std::vector<std::string> kSlots = {"A", "B", "E1", "E2", "keyword", "diff"};

}  // namespace

Rule Rule::parse(const std::string& text) {
  Rule r;
  r.text_ = text;
  r.root_ = Parser(text, r.keywords_).parse();
  return r;
}

bool Rule::evaluate(const data::Example& example) const { return eval(*root_, make_view(example)); }

Template Template::parse(const std::string& text) {
  Template t;
  t.text_ = text;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string::npos) {
    const auto end = text.find('}', pos);
    if (end == std::string::npos) raise(ErrorCode::kBadRule, "unterminated slot in template '" + text + "'");
    const auto slot = text.substr(pos + 1, end - pos - 1);
    if (std::find(kSlots.begin(), kSlots.end(), slot) == kSlots.end()) {
      raise(ErrorCode::kBadRule, "unknown slot {" + slot + "} in template '" + text + "'");
    }
    t.slots_.push_back(slot);
    pos = end + 1;
  }
  return t;
}

std::optional<std::string> Template::instantiate(const data::Example& example, const Rule& owner) const {
  const View v = make_view(example);
  auto fill = [&](const std::string& slot) -> std::optional<std::string> {
    if (slot == "A") return v.raw_a.empty() ? std::nullopt : std::optional(v.raw_a);
    if (slot == "B") return v.raw_b.empty() ? std::nullopt : std::optional(v.raw_b);
    if (slot == "E1" || slot == "E2") {
      const auto names = marked_names(v.a);
      if (!names) return std::nullopt;
      return v.a[static_cast<std::size_t>(slot == "E1" ? names->first : names->second)];
    }
    if (slot == "keyword") {
      for (const auto* seg : {&v.a, &v.b}) {
        for (const auto& w : *seg) {
          if (contains(owner.keywords(), w)) return w;
        }
      }
      return std::nullopt;
    }
    // diff: tokens of b absent from a.
    std::string out;
    for (const auto& w : v.b) {
      if (contains(v.a, w)) continue;
      if (!out.empty()) out += ' ';
      out += w;
    }
    return out.empty() ? std::nullopt : std::optional(out);
  };
  std::string out;
  std::size_t pos = 0;
  while (pos < text_.size()) {
    const auto open = text_.find('{', pos);
    if (open == std::string::npos) {
      out += text_.substr(pos);
      break;
    }
    out += text_.substr(pos, open - pos);
    const auto close = text_.find('}', open);
    auto value = fill(text_.substr(open + 1, close - open - 1));
    if (!value) return std::nullopt;
    out += *value;
    pos = close + 1;
  }
  return out;
}

std::vector<LabelingFunction> load_labeling_functions(const data::ConfigFile& config) {
  std::vector<LabelingFunction> out;
  for (const auto& section : config.sections()) {
    if (section.rfind("lf:", 0) != 0) continue;
    const std::string id = section.substr(3);
    auto key = [&](const char* k) {
      auto v = config.get(section + "." + k);
      if (!v || v->empty()) raise(ErrorCode::kBadRule, "labeling function '" + id + "' has no " + k);
      return *v;
    };
    LabelingFunction lf;
    lf.id = id;
    try {
      lf.label = std::stoi(key("label"));
    } catch (const std::logic_error&) {
      raise(ErrorCode::kBadRule, "labeling function '" + id + "' has a non-numeric label");
    }
    if (lf.label < 0) raise(ErrorCode::kBadRule, "labeling function '" + id + "' has a negative label");
    lf.rule = Rule::parse(key("rule"));
    lf.explanation = Template::parse(key("template"));
    out.push_back(std::move(lf));
  }
  return out;
}

std::vector<LabelingFunction> load_labeling_functions_file(const std::string& path) {
  return load_labeling_functions(data::ConfigFile::load(path));
}

std::vector<int> apply_lfs(const data::Example& example, std::span<const LabelingFunction> lfs) {
  std::vector<int> votes;
  votes.reserve(lfs.size());
  for (const auto& lf : lfs) votes.push_back(lf.rule.evaluate(example) ? lf.label : kAbstain);
  return votes;
}

VoteMatrix apply_lfs(std::span<const data::Example> examples, std::span<const LabelingFunction> lfs) {
  VoteMatrix out(examples.size());
  data::parallel_for(examples.size(), [&](std::size_t i) { out[i] = apply_lfs(examples[i], lfs); });
  return out;
}

}  // namespace cnat::weaksup
