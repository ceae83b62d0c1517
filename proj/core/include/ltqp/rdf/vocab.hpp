#pragma once

#include <string_view>

// Well-known IRIs shared across modules.
namespace ltqp::vocab {

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfLangString =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdDouble = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view kXsdBoolean = "http://www.w3.org/2001/XMLSchema#boolean";

inline constexpr std::string_view kOwlEquivalentProperty =
    "http://www.w3.org/2002/07/owl#equivalentProperty";
inline constexpr std::string_view kOwlEquivalentClass =
    "http://www.w3.org/2002/07/owl#equivalentClass";
inline constexpr std::string_view kOwlSameAs = "http://www.w3.org/2002/07/owl#sameAs";
inline constexpr std::string_view kRdfsSubPropertyOf =
    "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
inline constexpr std::string_view kRdfsSubClassOf =
    "http://www.w3.org/2000/01/rdf-schema#subClassOf";

// Rule-set vocabulary.
inline constexpr std::string_view kSemmap = "https://example.org/semmap#";
inline constexpr std::string_view kSemmapSubweb = "https://example.org/semmap#Subweb";
inline constexpr std::string_view kSemmapMapping = "https://example.org/semmap#Mapping";
inline constexpr std::string_view kSemmapIriPrefix = "https://example.org/semmap#iriPrefix";
inline constexpr std::string_view kSemmapSubjectId = "https://example.org/semmap#subjectId";
inline constexpr std::string_view kSemmapObjectId = "https://example.org/semmap#objectId";
inline constexpr std::string_view kSemmapMappingRelation =
    "https://example.org/semmap#mappingRelation";
inline constexpr std::string_view kSemmapScope = "https://example.org/semmap#scope";
inline constexpr std::string_view kSemmapRuleSetLocation =
    "https://example.org/semmap#ruleSetLocation";

}  // namespace ltqp::vocab
