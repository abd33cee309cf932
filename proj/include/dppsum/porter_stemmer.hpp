#ifndef DPPSUM_PORTER_STEMMER_HPP
#define DPPSUM_PORTER_STEMMER_HPP

#include <string>
#include <string_view>

namespace dppsum {

// Classic Porter (1980) suffix-stripping stemmer, following the reference C
// implementation. Expects lowercase ASCII; words of length <= 2 and words
// containing non-letters are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace dppsum

#endif  // DPPSUM_PORTER_STEMMER_HPP
