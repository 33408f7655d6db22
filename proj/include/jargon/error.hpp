#pragma once

#include <stdexcept>
#include <string>

namespace jargon {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable paths, truncated files.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data: bad jsonl lines, corrupt artifact headers, config
/// syntax errors.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A value violates an operation precondition (N = 0, alpha <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A query word is not part of the vocabulary.
class UnknownWord : public Error {
 public:
  explicit UnknownWord(const std::string& word)
      : Error("word not in vocabulary: '" + word + "'"), word_(word) {}
  const std::string& word() const noexcept { return word_; }

 private:
  std::string word_;
};

/// The word is in the vocabulary but has no embedding on the required side.
class NotEmbeddable : public Error {
 public:
  explicit NotEmbeddable(const std::string& word)
      : Error("word has no embedding: '" + word + "'"), word_(word) {}
  const std::string& word() const noexcept { return word_; }

 private:
  std::string word_;
};

/// Two artifacts that must agree (vocabulary fingerprint, pipeline
/// fingerprint, smoothing family) do not.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// Workspace artifacts are missing or do not match the manifest.
class StaleWorkspace : public Error {
 public:
  using Error::Error;
};

}  // namespace jargon
