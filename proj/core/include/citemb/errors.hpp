#pragma once

#include <stdexcept>
#include <string>

namespace citemb {

// Base class for data-level failures. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedXml : public Error {
public:
    explicit MalformedXml(const std::string& detail) : Error("malformed xml: " + detail) {}
};

class MissingBody : public Error {
public:
    MissingBody() : Error("document has no body element") {}
};

// The citing document carries no usable pmid/pmcid article-id.
class MissingDocId : public Error {
public:
    MissingDocId() : Error("document has no pmid/pmcid article-id") {}
};

class MissingPubYear : public Error {
public:
    MissingPubYear() : Error("document has no front-matter pub-date year") {}
};

class EmptyVocabulary : public Error {
public:
    EmptyVocabulary() : Error("no token survives the min-count thresholds") {}
};

class NoNegativePool : public Error {
public:
    NoNegativePool() : Error("vocabulary has no word tokens to draw negatives from") {}
};

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("training corpus is empty") {}
};

class DimMismatch : public Error {
public:
    explicit DimMismatch(const std::string& detail) : Error("dimension mismatch: " + detail) {}
};

class EmptyIntersection : public Error {
public:
    explicit EmptyIntersection(const std::string& detail)
        : Error("no shared vocabulary: " + detail) {}
};

class UnknownToken : public Error {
public:
    explicit UnknownToken(const std::string& token) : Error("token not in vocabulary: " + token) {}
};

class BadModelFile : public Error {
public:
    explicit BadModelFile(const std::string& detail) : Error("bad model file: " + detail) {}
};

// Usage / configuration problems. The CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace citemb
