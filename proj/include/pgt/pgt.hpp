#ifndef PGT_PGT_HPP
#define PGT_PGT_HPP

// Umbrella header for the Poisson group testing library.

#include "pgt/bitvec.hpp"
#include "pgt/bounds.hpp"
#include "pgt/channel.hpp"
#include "pgt/decode.hpp"
#include "pgt/design.hpp"
#include "pgt/dist.hpp"
#include "pgt/errors.hpp"
#include "pgt/harness.hpp"
#include "pgt/random.hpp"
#include "pgt/semiadaptive.hpp"

#endif
