#ifndef CTLP_CTLP_HPP
#define CTLP_CTLP_HPP

#include "ctlp/certify.hpp"
#include "ctlp/duality.hpp"
#include "ctlp/errors.hpp"
#include "ctlp/example1.hpp"
#include "ctlp/instance.hpp"
#include "ctlp/io.hpp"
#include "ctlp/linalg.hpp"
#include "ctlp/report.hpp"
#include "ctlp/simplex.hpp"
#include "ctlp/solver.hpp"
#include "ctlp/timefunc.hpp"

#endif  // CTLP_CTLP_HPP
