#pragma once

#include "thmm/core.hpp"
#include "thmm/moments.hpp"
#include "thmm/polynomials.hpp"
#include "thmm/dsm.hpp"
#include "thmm/resolvent.hpp"
#include "thmm/fractions.hpp"
#include "thmm/io.hpp"
