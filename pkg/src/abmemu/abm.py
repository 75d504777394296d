"""A compact social-care agent-based model.

Agents live on an 8 x 12 town grid, age in yearly steps from 1860 to
2050, form and dissolve partnerships, have children, migrate, work,
retire, and develop care needs whose hazard grows exponentially with
age. Informal care is supplied by kin; unmet weekly hours are priced
at a fixed hourly rate and divided by the living population to give
the model output, the per-capita annual cost of care.

The engine stores the population as parallel numpy arrays for speed.
Every stochastic draw comes from the state's own generator, so a run
is a pure function of (params, seed, demographic constants).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError, SequencingError
from .params import Demographics, SimParams

MALE, FEMALE = 0, 1
CHILD, WORKING_ADULT, UNEMPLOYED_ADULT, RETIRED = 0, 1, 2, 3

GENDER_NAMES = ("male", "female")
STATUS_NAMES = ("child", "workingAdult", "unemployedAdult", "retired")

# weekly hours of care required at each need level
CARE_LEVEL_HOURS = np.array([0.0, 8.0, 16.0, 30.0, 80.0])
MAX_CARE_LEVEL = len(CARE_LEVEL_HOURS) - 1

EVENT_NAMES = (
    "deaths", "births", "partnerships", "dissolutions",
    "migrations", "moveIns", "careEvents",
)

# Relative population density over an 8-wide, 12-tall grid. Only the
# ratios matter; weights are normalised when the towns are built.
DENSITY_MAP = np.array([
    [0.2, 0.3, 0.4, 0.4, 0.3, 0.2, 0.2, 0.1],
    [0.3, 0.6, 0.8, 0.6, 0.4, 0.3, 0.2, 0.2],
    [0.4, 0.8, 5.0, 1.5, 0.6, 0.4, 0.3, 0.2],
    [0.4, 1.0, 1.5, 1.0, 0.8, 0.5, 0.4, 0.3],
    [0.3, 0.6, 0.9, 2.5, 6.0, 1.2, 0.5, 0.3],
    [0.3, 0.5, 0.8, 1.2, 2.0, 0.8, 0.5, 0.3],
    [0.2, 0.5, 0.9, 1.0, 0.8, 0.6, 0.4, 0.2],
    [0.2, 0.6, 1.8, 4.0, 1.2, 0.6, 0.3, 0.2],
    [0.2, 0.4, 0.8, 1.2, 0.8, 0.4, 0.3, 0.2],
    [0.1, 0.3, 0.4, 0.6, 0.5, 0.3, 0.2, 0.1],
    [0.1, 0.2, 0.3, 0.3, 0.3, 0.2, 0.2, 0.1],
    [0.1, 0.1, 0.2, 0.2, 0.2, 0.1, 0.1, 0.1],
])


@dataclass(frozen=True)
class Town:
    gridX: int
    gridY: int
    densityWeight: float


def build_towns(density_map=DENSITY_MAP):
    """Towns from a density map, weights normalised to sum to one."""
    dm = np.asarray(density_map, dtype=float)
    if dm.ndim != 2 or np.any(dm < 0) or dm.sum() <= 0:
        raise DataError("density map must be a non-negative 2-D grid")
    weights = dm / dm.sum()
    towns = []
    for y in range(dm.shape[0]):
        for x in range(dm.shape[1]):
            towns.append(Town(gridX=x, gridY=y, densityWeight=weights[y, x]))
    return tuple(towns)


TOWNS = build_towns()
TOWN_WEIGHTS = np.array([t.densityWeight for t in TOWNS])


@dataclass(frozen=True)
class Agent:
    """Read-only view of one agent, assembled on demand from the arrays."""

    id: int
    age: int
    gender: str
    alive: bool
    status: str
    careNeedLevel: int
    weeklyHoursNeeded: float
    householdId: int
    partnerId: int
    parentIds: tuple
    childIds: tuple


@dataclass(frozen=True)
class CareAllocation:
    """Weekly care flows for one simulated year, indexed by agent id."""

    year: int
    hoursNeeded: np.ndarray
    hoursMet: np.ndarray
    hoursSupplied: np.ndarray
    budgets: np.ndarray

    @property
    def unmetTotal(self):
        return float(np.sum(self.hoursNeeded - self.hoursMet))


class SimState:
    """Mutable simulation state: one population, one PRNG stream."""

    def __init__(self, year, rng, demographics):
        self.year = year
        self.rng = rng
        self.demographics = demographics
        n0 = 0
        self.age = np.zeros(n0, dtype=np.int64)
        self.gender = np.zeros(n0, dtype=np.int8)
        self.alive = np.zeros(n0, dtype=bool)
        self.status = np.zeros(n0, dtype=np.int8)
        self.care_level = np.zeros(n0, dtype=np.int8)
        self.partner = np.zeros(n0, dtype=np.int64)
        self.mother = np.zeros(n0, dtype=np.int64)
        self.father = np.zeros(n0, dtype=np.int64)
        self.household = np.zeros(n0, dtype=np.int64)
        self.household_town = np.zeros(0, dtype=np.int64)
        self.events = dict.fromkeys(EVENT_NAMES, 0)
        self.last_allocation = None
        self.last_cost = 0.0

    @property
    def n_agents(self):
        return self.age.size

    @property
    def n_alive(self):
        return int(np.count_nonzero(self.alive))

    @property
    def rngState(self):
        return self.rng.bit_generator.state

    def add_household(self, town):
        self.household_town = np.append(self.household_town, town)
        return self.household_town.size - 1

    def add_agents(self, age, gender, status, household,
                   partner=None, mother=None, father=None):
        """Append a batch of agents; returns their new ids."""
        k = len(age)
        first = self.n_agents
        minus = np.full(k, -1, dtype=np.int64)
        self.age = np.concatenate([self.age, np.asarray(age, np.int64)])
        self.gender = np.concatenate([self.gender, np.asarray(gender, np.int8)])
        self.alive = np.concatenate([self.alive, np.ones(k, bool)])
        self.status = np.concatenate([self.status, np.asarray(status, np.int8)])
        self.care_level = np.concatenate([self.care_level, np.zeros(k, np.int8)])
        self.partner = np.concatenate(
            [self.partner, minus if partner is None else np.asarray(partner, np.int64)])
        self.mother = np.concatenate(
            [self.mother, minus if mother is None else np.asarray(mother, np.int64)])
        self.father = np.concatenate(
            [self.father, minus if father is None else np.asarray(father, np.int64)])
        self.household = np.concatenate(
            [self.household, np.asarray(household, np.int64)])
        return np.arange(first, first + k)

    def children_of(self, i):
        return np.flatnonzero((self.mother == i) | (self.father == i))

    def agent(self, i):
        """Assemble the Agent view for id i."""
        if not 0 <= i < self.n_agents:
            raise DataError("no agent with id %d" % i)
        parents = tuple(int(p) for p in (self.mother[i], self.father[i]) if p >= 0)
        level = int(self.care_level[i])
        return Agent(
            id=int(i),
            age=int(self.age[i]),
            gender=GENDER_NAMES[self.gender[i]],
            alive=bool(self.alive[i]),
            status=STATUS_NAMES[self.status[i]],
            careNeedLevel=level,
            weeklyHoursNeeded=float(CARE_LEVEL_HOURS[level]),
            householdId=int(self.household[i]),
            partnerId=int(self.partner[i]),
            parentIds=parents,
            childIds=tuple(int(c) for c in self.children_of(i)),
        )

    def households(self):
        """All households as (id, townId, living member ids)."""
        out = []
        for h in range(self.household_town.size):
            members = np.flatnonzero(self.alive & (self.household == h))
            out.append((h, int(self.household_town[h]),
                        tuple(int(m) for m in members)))
        return out

    @property
    def towns(self):
        return TOWNS


@dataclass(frozen=True, eq=False)
class RunResult:
    """Everything one simulation run produces."""

    finalCostPerCapita: float
    costSeries: np.ndarray
    populationSeries: np.ndarray
    seed: int
    params: SimParams
    extinct: bool = False


def _mask_seed(seed):
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def init_population(seed, params, demographics=None):
    """Couples placed on the town grid in the starting year."""
    demog = demographics if demographics is not None else Demographics.default()
    rng = np.random.default_rng(_mask_seed(seed))
    state = SimState(year=params.startYear, rng=rng, demographics=demog)
    n = params.initialCouples
    if n == 0:
        return state
    town_of_couple = rng.choice(len(TOWNS), size=n, p=TOWN_WEIGHTS)
    lo, hi = demog.initialAgeMin, demog.initialAgeMax
    ages = rng.integers(lo, hi + 1, size=2 * n)
    employed = rng.random(2 * n) < demog.initialEmploymentRate
    status = np.where(employed, WORKING_ADULT, UNEMPLOYED_ADULT).astype(np.int8)
    status[ages >= params.ageOfRetirement] = RETIRED
    gender = np.tile(np.array([MALE, FEMALE], np.int8), n)
    household = np.repeat(np.arange(n, dtype=np.int64), 2)
    partner = np.arange(2 * n, dtype=np.int64)
    partner[0::2] += 1
    partner[1::2] -= 1
    state.household_town = town_of_couple.astype(np.int64)
    state.add_agents(ages, gender, status, household, partner=partner)
    return state


def develop_care_need(agent, params, rng):
    """One agent's yearly care-need draw; returns the new level.

    The annual hazard is personCareProb * exp(age / scaling) with the
    scaling chosen by gender, capped at 1. A success raises the level
    by one step, saturating at the top of the ladder.
    """
    scaling = (params.maleAgeCareScaling if agent.gender == "male"
               else params.femaleAgeCareScaling)
    p = min(1.0, params.personCareProb * np.exp(agent.age / scaling))
    level = agent.careNeedLevel
    if rng.random() < p:
        level = min(level + 1, MAX_CARE_LEVEL)
    return level


def _dependent_minors(state, i, old_house):
    """Minors who move with agent i: their children, following the
    mother when she is present in the household, else the father."""
    adulthood = state.demographics.adulthoodAge
    kids = np.flatnonzero(state.alive
                          & (state.age < adulthood)
                          & (state.household == old_house))
    out = []
    for k in kids:
        m, f = state.mother[k], state.father[k]
        if m == i:
            out.append(int(k))
        elif f == i:
            mother_here = (m >= 0 and state.alive[m]
                           and state.household[m] == old_house)
            if not mother_here:
                out.append(int(k))
    return out


def _move_with_dependents(state, i, new_house):
    old = int(state.household[i])
    movers = [int(i)] + _dependent_minors(state, i, old)
    state.household[movers] = new_house


def _phase_ageing(state):
    state.age[state.alive] += 1


def _phase_mortality(state):
    demog, rng = state.demographics, state.rng
    idx = np.flatnonzero(state.alive)
    base = np.where(state.gender[idx] == MALE,
                    demog.mortalityBaseMale, demog.mortalityBaseFemale)
    hazard = np.minimum(1.0, base * np.exp(demog.mortalityGrowth * state.age[idx]))
    died = idx[rng.random(idx.size) < hazard]
    if died.size:
        state.alive[died] = False
        state.partner[died] = -1
        widowed = np.flatnonzero(state.alive & (state.partner >= 0))
        widowed = widowed[~state.alive[state.partner[widowed]]]
        state.partner[widowed] = -1
    state.events["deaths"] += int(died.size)


def _phase_births(state):
    demog, rng = state.demographics, state.rng
    eligible = np.flatnonzero(
        state.alive
        & (state.gender == FEMALE)
        & (state.partner >= 0)
        & (state.age >= demog.fertilityAgeMin)
        & (state.age <= demog.fertilityAgeMax))
    if eligible.size == 0:
        return
    mothers = eligible[rng.random(eligible.size) < demog.birthProb]
    if mothers.size == 0:
        return
    genders = rng.integers(0, 2, size=mothers.size).astype(np.int8)
    state.add_agents(
        age=np.zeros(mothers.size, np.int64),
        gender=genders,
        status=np.full(mothers.size, CHILD, np.int8),
        household=state.household[mothers],
        mother=mothers,
        father=state.partner[mothers],
    )
    state.events["births"] += int(mothers.size)


def _phase_partnerships(state):
    demog, rng = state.demographics, state.rng
    single = (state.alive
              & (state.partner < 0)
              & (state.age >= demog.adulthoodAge))
    if not single.any():
        return
    town_of_agent = state.household_town[state.household]
    for t in range(len(TOWNS)):
        here = single & (town_of_agent == t)
        men = np.flatnonzero(here & (state.gender == MALE))
        women = np.flatnonzero(here & (state.gender == FEMALE))
        if men.size == 0 or women.size == 0:
            continue
        men = rng.permutation(men)
        women = rng.permutation(women)
        k = min(men.size, women.size)
        accept = rng.random(k) < demog.partnershipProb
        for m, w in zip(men[:k][accept], women[:k][accept]):
            state.partner[m], state.partner[w] = w, m
            new_house = state.add_household(t)
            _move_with_dependents(state, m, new_house)
            _move_with_dependents(state, w, new_house)
            state.events["partnerships"] += 1


def _phase_dissolutions(state):
    demog, rng = state.demographics, state.rng
    idx = np.flatnonzero(state.alive & (state.partner >= 0))
    couples = idx[idx < state.partner[idx]]  # count each pair once
    if couples.size == 0:
        return
    split = couples[rng.random(couples.size) < demog.divorceProb]
    town_of_agent = state.household_town[state.household]
    for i in split:
        j = state.partner[i]
        state.partner[i] = state.partner[j] = -1
        leaver = i if state.gender[i] == MALE else j
        new_house = state.add_household(int(town_of_agent[leaver]))
        _move_with_dependents(state, leaver, new_house)
        state.events["dissolutions"] += 1


def _phase_migration(state, params):
    demog, rng = state.demographics, state.rng
    occupied = np.unique(state.household[state.alive])
    if occupied.size:
        movers = occupied[rng.random(occupied.size) < demog.migrationProb]
        if movers.size:
            state.household_town[movers] = rng.choice(
                len(TOWNS), size=movers.size, p=TOWN_WEIGHTS)
            state.events["migrations"] += int(movers.size)
    # ageing parents joining an adult child's household
    if params.ageingParentsMoveInWithKids <= 0:
        return
    adulthood = demog.adulthoodAge
    candidates = np.flatnonzero(state.alive
                                & (state.partner < 0)
                                & (state.age >= params.ageOfRetirement))
    for i in candidates:
        kids = state.children_of(i)
        kids = kids[state.alive[kids] & (state.age[kids] >= adulthood)]
        if kids.size == 0:
            continue
        if np.any(state.household[kids] == state.household[i]):
            continue  # already living with an adult child
        if rng.random() < params.ageingParentsMoveInWithKids:
            target = kids[rng.integers(kids.size)]
            _move_with_dependents(state, i, int(state.household[target]))
            state.events["moveIns"] += 1


def _phase_employment(state, params):
    demog, rng = state.demographics, state.rng
    grown = state.alive & (state.status == CHILD) & (state.age >= demog.adulthoodAge)
    state.status[grown] = UNEMPLOYED_ADULT
    working_age = state.alive & (state.age < params.ageOfRetirement)
    losers = np.flatnonzero(working_age & (state.status == WORKING_ADULT))
    state.status[losers[rng.random(losers.size) < demog.jobLossProb]] = UNEMPLOYED_ADULT
    seekers = np.flatnonzero(working_age & (state.status == UNEMPLOYED_ADULT))
    state.status[seekers[rng.random(seekers.size) < demog.jobFindProb]] = WORKING_ADULT


def _phase_retirement(state, params):
    retiring = state.alive & (state.age >= params.ageOfRetirement) \
        & (state.status != RETIRED)
    state.status[retiring] = RETIRED


def _phase_care_development(state, params):
    rng = state.rng
    idx = np.flatnonzero(state.alive)
    if idx.size == 0:
        return
    scaling = np.where(state.gender[idx] == MALE,
                       params.maleAgeCareScaling, params.femaleAgeCareScaling)
    p = np.minimum(1.0, params.personCareProb * np.exp(state.age[idx] / scaling))
    hit = rng.random(idx.size) < p
    level = state.care_level[idx[hit]]
    state.events["careEvents"] += int(np.count_nonzero(level < MAX_CARE_LEVEL))
    state.care_level[idx[hit]] = np.minimum(level + 1, MAX_CARE_LEVEL)


def allocate_care(state, params):
    """Match informal care supply to need for the current year.

    Carers are living agents without a care need. Each draws a
    willingness: full status budget with probability
    min(1, baseCareProb * 500), otherwise half. Needers are served in
    decreasing order of severity, drawing first on household members,
    then on parents and children living in the same town.
    """
    n = state.n_agents
    hours_needed = np.zeros(n)
    hours_met = np.zeros(n)
    supplied = np.zeros(n)
    budgets = np.zeros(n)

    needers = np.flatnonzero(state.alive & (state.care_level > 0))
    hours_needed[needers] = CARE_LEVEL_HOURS[state.care_level[needers]]

    carers = np.flatnonzero(state.alive & (state.care_level == 0))
    if carers.size:
        status_budget = np.array([params.childHours, params.workingAdultHours,
                                  params.homeAdultHours, params.retiredHours])
        base = status_budget[state.status[carers]]
        willing = state.rng.random(carers.size) < min(1.0, params.baseCareProb * 500.0)
        budgets[carers] = np.where(willing, base, 0.5 * base)

    if needers.size == 0 or carers.size == 0:
        return CareAllocation(state.year, hours_needed, hours_met,
                              supplied, budgets)

    remaining = budgets.copy()
    is_carer = np.zeros(n, dtype=bool)
    is_carer[carers] = True
    town_of_agent = state.household_town[state.household]

    order = np.lexsort((needers, -hours_needed[needers]))
    for i in needers[order]:
        shortfall = hours_needed[i] - hours_met[i]
        in_house = np.flatnonzero(is_carer & (state.household == state.household[i]))
        kin = [p for p in (state.mother[i], state.father[i]) if p >= 0]
        kin.extend(state.children_of(i))
        kin = [k for k in kin
               if is_carer[k] and town_of_agent[k] == town_of_agent[i]]
        for c in list(in_house) + sorted(set(kin) - set(in_house.tolist())):
            if shortfall <= 0:
                break
            take = min(shortfall, remaining[c])
            if take > 0:
                remaining[c] -= take
                supplied[c] += take
                hours_met[i] += take
                shortfall -= take

    return CareAllocation(state.year, hours_needed, hours_met, supplied, budgets)


def annual_cost(state, params):
    """Per-capita yearly cost of unmet care at the fixed hourly rate."""
    population = state.n_alive
    if population == 0:
        return 0.0
    alloc = state.last_allocation
    if alloc is None or alloc.year != state.year:
        raise SequencingError("allocate_care must run before annual_cost")
    unmet = float(np.sum(alloc.hoursNeeded - alloc.hoursMet))
    return unmet * 52.0 * params.hourlyCareCost / population


def step_year(state, params):
    """Advance the state by one calendar year, in the fixed phase order:
    ageing, mortality, births, partnerships, dissolutions, migration,
    employment, retirement, care development, care allocation, costing."""
    if state.year >= params.endYear:
        raise SequencingError(
            "cannot step past the end year %d" % params.endYear)
    state.year += 1
    state.events = dict.fromkeys(EVENT_NAMES, 0)
    if state.alive.any():
        _phase_ageing(state)
        _phase_mortality(state)
        _phase_births(state)
        _phase_partnerships(state)
        _phase_dissolutions(state)
        _phase_migration(state, params)
        _phase_employment(state, params)
        _phase_retirement(state, params)
        _phase_care_development(state, params)
    state.last_allocation = allocate_care(state, params)
    state.last_cost = annual_cost(state, params)
    return state


def run_simulation(params, seed, demographics=None):
    """One full run: initialise at startYear, step to endYear.

    Extinction is flagged, not fatal; an empty population simply
    records zero cost for the remaining years.
    """
    state = init_population(seed, params, demographics)
    costs = [0.0]
    pops = [state.n_alive]
    for _ in range(params.endYear - params.startYear):
        step_year(state, params)
        costs.append(state.last_cost)
        pops.append(state.n_alive)
    return RunResult(
        finalCostPerCapita=costs[-1],
        costSeries=np.array(costs),
        populationSeries=np.array(pops, dtype=np.int64),
        seed=_mask_seed(seed),
        params=params,
        extinct=pops[-1] == 0,
    )
