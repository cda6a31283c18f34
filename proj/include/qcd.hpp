#pragma once

#include "qcd/almostprime.hpp"
#include "qcd/arith.hpp"
#include "qcd/chars.hpp"
#include "qcd/density.hpp"
#include "qcd/quadsolve.hpp"
#include "qcd/report.hpp"
#include "qcd/residues.hpp"
#include "qcd/sieve.hpp"
#include "qcd/tuples.hpp"
#include "qcd/verify.hpp"
