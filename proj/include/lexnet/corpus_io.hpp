#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "lexnet/model.hpp"

namespace lexnet::io {

/// Parse or structural failure while reading a corpus file. line == 0 means
/// the problem is not tied to a single line (e.g. unreadable file).
class CorpusError : public std::runtime_error {
public:
    CorpusError(std::string message, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                                  : message),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One JSON object per line. Node records:
///   {"kind":"node","id":...,"branch":...,"rank":...,"parent":...,"label":...,"attributes":{...}}
/// Edge records:
///   {"kind":"edge","source":...,"target":...,"multiplicity":N}
/// Parents precede children; edges follow all nodes. Duplicate ids, unknown
/// parents and unknown endpoints throw CorpusError with the offending line.
/// When validate is true (the default), structural violations also fail the
/// load, reporting the first violation.
BaseNetwork load_corpus(const std::string& path, bool validate = true);
BaseNetwork read_corpus(std::istream& in, bool validate = true);

/// Deterministic inverse of load_corpus: judicial nodes before legislative,
/// rank-major then id within a branch, then edges ordered by (source, target).
void save_corpus(const BaseNetwork& base, std::ostream& out);
std::string corpus_to_string(const BaseNetwork& base);

}  // namespace lexnet::io
