// Copyright 2026 The EDL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EDL_COMMON_HPP_
#define EDL_COMMON_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace edl {

enum class ErrorCode {
  MalformedInput,
  DuplicateDocId,
  UnknownEntityType,
  IoError,
  CrossingSpans,
  UnmatchedBracket,
  PlaceholderCountMismatch,
  ShapeMismatch,
  NonFiniteLoss,
  EmptySentence,
  StepOutOfRange,
  EmptyTrainingSet,
  AlphabetMismatch,
  DuplicateKbId,
  EmptyInput,
  UnknownCandidate,
  EmptyList,
  GoldNotInList,
  MissingArtifact,
  InvalidConfig,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::DuplicateDocId: return "DuplicateDocId";
    case ErrorCode::UnknownEntityType: return "UnknownEntityType";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CrossingSpans: return "CrossingSpans";
    case ErrorCode::UnmatchedBracket: return "UnmatchedBracket";
    case ErrorCode::PlaceholderCountMismatch: return "PlaceholderCountMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::EmptySentence: return "EmptySentence";
    case ErrorCode::StepOutOfRange: return "StepOutOfRange";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::DuplicateKbId: return "DuplicateKbId";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownCandidate: return "UnknownCandidate";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::GoldNotInList: return "GoldNotInList";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

// All library failures are reported through this exception type. The code
// is stable and machine readable; the message carries detail such as the
// offending line number.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

enum class EntityType { PER = 0, ORG = 1, GPE = 2, LOC = 3, FAC = 4 };
enum class MentionKind { NAM = 0, NOM = 1 };
enum class Language { ENG = 0, CMN = 1, SPA = 2 };
enum class Category { NewsReport = 0, DiscussionForum = 1 };

inline constexpr int kNumEntityTypes = 5;
inline constexpr int kNumKinds = 2;
inline constexpr int kNumCategories = 2;

inline constexpr std::array<EntityType, 5> kAllEntityTypes = {
    EntityType::PER, EntityType::ORG, EntityType::GPE, EntityType::LOC,
    EntityType::FAC};
inline constexpr std::array<MentionKind, 2> kAllKinds = {MentionKind::NAM,
                                                         MentionKind::NOM};
inline constexpr std::array<Language, 3> kAllLanguages = {
    Language::ENG, Language::CMN, Language::SPA};

inline const char* to_string(EntityType t) {
  switch (t) {
    case EntityType::PER: return "PER";
    case EntityType::ORG: return "ORG";
    case EntityType::GPE: return "GPE";
    case EntityType::LOC: return "LOC";
    case EntityType::FAC: return "FAC";
  }
  return "?";
}

inline const char* to_string(MentionKind k) {
  return k == MentionKind::NAM ? "NAM" : "NOM";
}

inline const char* to_string(Language l) {
  switch (l) {
    case Language::ENG: return "ENG";
    case Language::CMN: return "CMN";
    case Language::SPA: return "SPA";
  }
  return "?";
}

inline const char* to_string(Category c) {
  return c == Category::NewsReport ? "NW" : "DF";
}

inline std::optional<EntityType> parse_entity_type(std::string_view s) {
  for (EntityType t : kAllEntityTypes) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

inline std::optional<MentionKind> parse_kind(std::string_view s) {
  if (s == "NAM") return MentionKind::NAM;
  if (s == "NOM") return MentionKind::NOM;
  return std::nullopt;
}

inline std::optional<Language> parse_language(std::string_view s) {
  for (Language l : kAllLanguages) {
    if (s == to_string(l)) return l;
  }
  return std::nullopt;
}

// Accepts the short codes used in document files as well as the long names.
inline std::optional<Category> parse_category(std::string_view s) {
  if (s == "NW" || s == "NewsReport") return Category::NewsReport;
  if (s == "DF" || s == "DiscussionForum") return Category::DiscussionForum;
  return std::nullopt;
}

// 64-bit FNV-1a. Used for config hashes recorded in manifests.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace edl

#endif  // EDL_COMMON_HPP_
