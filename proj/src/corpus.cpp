#include "sqlgate/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "sqlgate/sql_ast.hpp"
#include "sqlgate/sqlite_db.hpp"

namespace sqlgate {

std::string_view db_kind_name(DbKind k) {
  switch (k) {
    case DbKind::HR: return "hr";
    case DbKind::WH: return "wh";
    case DbKind::IN: return "in";
  }
  return "hr";
}

std::optional<DbKind> parse_db_kind(std::string_view s) {
  for (DbKind k : {DbKind::HR, DbKind::WH, DbKind::IN})
    if (iequals(s, db_kind_name(k))) return k;
  return std::nullopt;
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Base: return "base";
    case Variant::Fnc: return "fnc";
    case Variant::With: return "with";
  }
  return "base";
}

std::optional<Variant> parse_variant(std::string_view s) {
  for (Variant v : {Variant::Base, Variant::Fnc, Variant::With})
    if (iequals(s, variant_name(v))) return v;
  return std::nullopt;
}

std::string_view fixture_db_id(DbKind k) {
  switch (k) {
    case DbKind::HR: return "hr";
    case DbKind::WH: return "warehouse";
    case DbKind::IN: return "invoicing";
  }
  return "hr";
}

SplitSizes default_splits(DbKind db, Variant variant) {
  if (variant == Variant::With) {
    if (db == DbKind::HR) return {35, 4, 8};
    if (db == DbKind::WH) return {18, 3, 7};
    throw ConfigError("no WITH corpus for the IN database");
  }
  switch (db) {
    case DbKind::HR: return {99, 10, 78};
    case DbKind::WH: return {146, 16, 40};
    case DbKind::IN: return {145, 18, 46};
  }
  return {};
}

namespace {

/// mt19937_64 has a fixed output sequence, unlike the std distributions,
/// so fixtures are identical across standard libraries.
struct Rng {
  explicit Rng(std::uint64_t seed) : g(seed) {}
  size_t below(size_t n) { return static_cast<size_t>(g() % n); }
  bool chance(size_t percent) { return below(100) < percent; }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }
  std::mt19937_64 g;
};

std::string two(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

std::string date(int y, int m, int d) { return std::to_string(y) + "-" + two(m) + "-" + two(d); }

std::string random_date(Rng& rng, int from_year, int years) {
  return date(from_year + static_cast<int>(rng.below(static_cast<size_t>(years))), 1 + static_cast<int>(rng.below(12)),
              1 + static_cast<int>(rng.below(28)));
}

double cents(Rng& rng, int lo, int span) {
  return lo + static_cast<double>(rng.below(static_cast<size_t>(span))) + static_cast<double>(rng.below(100)) / 100.0;
}

const std::vector<std::string> kFirst{"Alice", "Bruno",  "Carla", "David", "Elena", "Frank", "Grace",
                                      "Hugo",  "Irene",  "Jonas", "Karen", "Liam",  "Maria", "Nadia",
                                      "Oscar", "Paula",  "Quinn", "Rosa",  "Samir", "Tina"};
const std::vector<std::string> kLast{"Adams", "Baker",  "Chen",  "Diaz",   "Evans", "Fischer", "Garcia",
                                     "Hill",  "Ito",    "Jones", "Khan",   "Lopez", "Meyer",   "Novak",
                                     "Olsen", "Patel",  "Rossi", "Silva",  "Turner", "Wong"};

std::vector<std::string> person_names(Rng& rng, size_t n) {
  std::vector<std::string> all;
  for (const auto& f : kFirst)
    for (const auto& l : kLast) all.push_back(f + " " + l);
  rng.shuffle(all);
  all.resize(n);
  return all;
}

void insert_rows(db::Database& db, const std::string& sql, const std::vector<std::vector<db::Cell>>& rows) {
  auto st = db.prepare(sql);
  for (const auto& r : rows) {
    st.bind_all(r);
    st.step();
    st.reset();
  }
}

void create_hr(db::Database& db, Rng& rng) {
  db.exec(
      "CREATE TABLE employees (emp_no INTEGER PRIMARY KEY, name TEXT NOT NULL, birthdate DATE, hire_date DATE, "
      "leave_date DATE, dept TEXT, manager INTEGER REFERENCES employees(emp_no), salary DECIMAL(10,2), "
      "bonus DECIMAL(10,2))");
  const std::vector<std::string> depts{"Sales", "R&D", "Marketing", "Finance", "Support", "Engineering"};
  auto names = person_names(rng, 60);
  std::vector<std::vector<db::Cell>> rows;
  for (size_t i = 0; i < names.size(); ++i) {
    const bool head = i < depts.size();
    db::Cell manager = std::monostate{};
    if (i > 0) manager = static_cast<std::int64_t>(head ? 1001 : 1001 + i % depts.size());
    const int hire_year = 2000 + static_cast<int>(rng.below(22));
    db::Cell leave = std::monostate{};
    if (!head && rng.chance(25))
      leave = date(hire_year + 1 + static_cast<int>(rng.below(3)), 1 + static_cast<int>(rng.below(12)),
                   1 + static_cast<int>(rng.below(28)));
    const double salary = head ? 90000.0 + 1000.0 * static_cast<double>(rng.below(60))
                               : 40000.0 + 1000.0 * static_cast<double>(rng.below(80)) + (rng.chance(50) ? 500.0 : 0.0);
    rows.push_back({static_cast<std::int64_t>(1001 + i), names[i], random_date(rng, 1960, 40),
                    date(hire_year, 1 + static_cast<int>(rng.below(12)), 1 + static_cast<int>(rng.below(28))), leave,
                    depts[i % depts.size()], manager, salary, 500.0 * static_cast<double>(rng.below(41))});
  }
  insert_rows(db, "INSERT INTO employees VALUES (?,?,?,?,?,?,?,?,?)", rows);
}

void create_wh(db::Database& db, Rng& rng) {
  db.exec(R"(
CREATE TABLE vendors (vendor_id INTEGER PRIMARY KEY, name TEXT NOT NULL, city TEXT);
CREATE TABLE shops (shop_id INTEGER PRIMARY KEY, name TEXT NOT NULL, city TEXT);
CREATE TABLE stock (shop_id INTEGER REFERENCES shops(shop_id), product_id INTEGER REFERENCES products(product_id), quantity INTEGER);
CREATE TABLE customers (customer_id INTEGER PRIMARY KEY, name TEXT NOT NULL, city TEXT);
CREATE TABLE manufacturers (manufacturer_id INTEGER PRIMARY KEY, name TEXT NOT NULL, country TEXT);
CREATE TABLE products (product_id INTEGER PRIMARY KEY, name TEXT NOT NULL, category TEXT, price DECIMAL(10,2),
  manufacturer_id INTEGER REFERENCES manufacturers(manufacturer_id), vendor_id INTEGER REFERENCES vendors(vendor_id));
CREATE TABLE sales (sale_id INTEGER PRIMARY KEY, shop_id INTEGER REFERENCES shops(shop_id),
  customer_id INTEGER REFERENCES customers(customer_id), sale_date DATE, total DECIMAL(10,2));
CREATE TABLE sales_details (sale_id INTEGER REFERENCES sales(sale_id), product_id INTEGER REFERENCES products(product_id),
  quantity INTEGER, unit_price DECIMAL(10,2));
)");
  const std::vector<std::string> cities{"Austin", "Boston", "Chicago", "Denver", "Seattle", "Miami", "Portland", "Phoenix"};
  const std::vector<std::string> vendors{"ACME Corp",        "Globex",          "Initech",      "Umbrella Supply",
                                         "Stark Trading",    "Wayne Goods",     "Hooli Parts",  "Vandelay Imports",
                                         "Soylent Foods",    "Tyrell Supply"};
  const std::vector<std::string> shops{"Downtown Store", "Mall Outlet",    "Harbor Shop",    "Airport Kiosk",
                                       "Uptown Market",  "Riverside Shop", "Lakeside Store", "Station Shop"};
  const std::vector<std::string> makers{"Bosch", "Makita", "Sony", "Lego", "Philips", "Fiskars", "Hasbro", "Canon"};
  const std::vector<std::string> countries{"USA", "Germany", "Japan", "China", "Mexico", "Italy"};
  const std::vector<std::string> categories{"Tools", "Garden", "Kitchen", "Electronics", "Toys", "Office"};
  const std::vector<std::string> adjectives{"Steel", "Compact", "Deluxe", "Classic", "Smart"};
  const std::vector<std::string> nouns{"Hammer", "Kettle", "Lamp", "Drill", "Blender", "Radio", "Puzzle", "Stapler"};

  std::vector<std::vector<db::Cell>> rows;
  for (size_t i = 0; i < vendors.size(); ++i)
    rows.push_back({static_cast<std::int64_t>(i + 1), vendors[i], rng.pick(cities)});
  insert_rows(db, "INSERT INTO vendors VALUES (?,?,?)", rows);
  rows.clear();
  for (size_t i = 0; i < shops.size(); ++i) rows.push_back({static_cast<std::int64_t>(i + 1), shops[i], cities[i]});
  insert_rows(db, "INSERT INTO shops VALUES (?,?,?)", rows);
  rows.clear();
  auto people = person_names(rng, 29);
  people.insert(people.begin(), "ACME Corp");
  for (size_t i = 0; i < people.size(); ++i)
    rows.push_back({static_cast<std::int64_t>(i + 1), people[i], rng.pick(cities)});
  insert_rows(db, "INSERT INTO customers VALUES (?,?,?)", rows);
  rows.clear();
  for (size_t i = 0; i < makers.size(); ++i)
    rows.push_back({static_cast<std::int64_t>(i + 1), makers[i], countries[i % countries.size()]});
  insert_rows(db, "INSERT INTO manufacturers VALUES (?,?,?)", rows);
  rows.clear();
  std::vector<std::string> product_names;
  for (const auto& a : adjectives)
    for (const auto& n : nouns) product_names.push_back(a + " " + n);
  rng.shuffle(product_names);
  std::vector<double> prices;
  for (size_t i = 0; i < product_names.size(); ++i) {
    prices.push_back(cents(rng, 5, 495));
    rows.push_back({static_cast<std::int64_t>(i + 1), product_names[i], categories[i % categories.size()], prices.back(),
                    static_cast<std::int64_t>(1 + rng.below(makers.size())),
                    static_cast<std::int64_t>(1 + rng.below(vendors.size()))});
  }
  insert_rows(db, "INSERT INTO products VALUES (?,?,?,?,?,?)", rows);
  rows.clear();
  for (size_t s = 0; s < shops.size(); ++s)
    for (size_t p = 0; p < product_names.size(); ++p)
      if (rng.chance(60))
        rows.push_back({static_cast<std::int64_t>(s + 1), static_cast<std::int64_t>(p + 1),
                        static_cast<std::int64_t>(1 + rng.below(200))});
  insert_rows(db, "INSERT INTO stock VALUES (?,?,?)", rows);
  rows.clear();
  std::vector<std::vector<db::Cell>> details;
  for (size_t i = 0; i < 200; ++i) {
    const auto sale = static_cast<std::int64_t>(i + 1);
    double total = 0;
    const size_t lines = 1 + rng.below(4);
    for (size_t k = 0; k < lines; ++k) {
      const size_t p = rng.below(product_names.size());
      const auto qty = static_cast<std::int64_t>(1 + rng.below(5));
      total += static_cast<double>(qty) * prices[p];
      details.push_back({sale, static_cast<std::int64_t>(p + 1), qty, prices[p]});
    }
    rows.push_back({sale, static_cast<std::int64_t>(1 + rng.below(shops.size())),
                    static_cast<std::int64_t>(1 + rng.below(people.size())), random_date(rng, 2023, 2),
                    std::round(total * 100.0) / 100.0});
  }
  insert_rows(db, "INSERT INTO sales VALUES (?,?,?,?,?)", rows);
  insert_rows(db, "INSERT INTO sales_details VALUES (?,?,?,?)", details);
}

void create_in(db::Database& db, Rng& rng) {
  db.exec(R"(
CREATE TABLE inv (id INTEGER PRIMARY KEY, con_number INTEGER REFERENCES contract(con_number), cu_name TEXT,
  bill_amnt DECIMAL(10,2), status TEXT, created TEXT, p_date DATE);
CREATE TABLE contract (con_number INTEGER PRIMARY KEY, cu_name TEXT NOT NULL, cus_address TEXT, con_status TEXT,
  start_date DATE);
CREATE TABLE p_number (p_id INTEGER PRIMARY KEY, p_name TEXT NOT NULL, con_number INTEGER REFERENCES contract(con_number),
  status TEXT, p_date DATE);
CREATE TABLE assignment (a_id INTEGER PRIMARY KEY, p_id INTEGER REFERENCES p_number(p_id), emp_name TEXT, role TEXT,
  hours DECIMAL(6,1));
)");
  const std::vector<std::string> companies{"Northwind Traders", "Contoso Ltd",     "Fabrikam Inc",   "Adventure Works",
                                           "Litware Inc",       "Tailspin Toys",   "Wingtip Toys",   "Proseware Inc",
                                           "Lucerne Publishing", "Coho Winery",    "Margie Travel",  "Alpine Ski House"};
  const std::vector<std::string> streets{"Main St", "Oak Ave", "Pine Rd", "Lake Dr", "Hill St", "Bay Rd"};
  const std::vector<std::string> codenames{"Apollo", "Borealis", "Cobalt", "Delta",  "Ember",  "Falcon",
                                           "Granite", "Horizon", "Iris",   "Juniper", "Keystone", "Lumen",
                                           "Meridian", "Nimbus", "Orion",  "Pulsar", "Quartz", "Redwood",
                                           "Summit", "Tundra",  "Umbra",  "Vertex", "Willow", "Xenon",
                                           "Yukon",  "Zephyr",  "Atlas",  "Beacon", "Comet",  "Dune"};
  const std::vector<std::string> roles{"Analyst", "Developer", "Manager", "Tester", "Consultant"};
  const std::vector<std::string> statuses{"RT", "RJ", "P", "A", "R", "N", "D", "C", "C", "C"};

  std::vector<std::vector<db::Cell>> rows;
  std::vector<std::string> contract_customer;
  for (size_t i = 0; i < 24; ++i) {
    contract_customer.push_back(companies[i % companies.size()]);
    rows.push_back({static_cast<std::int64_t>(5001 + i), contract_customer.back(),
                    std::to_string(10 + rng.below(990)) + " " + rng.pick(streets), rng.chance(70) ? "Open" : "Closed",
                    random_date(rng, 2019, 5)});
  }
  insert_rows(db, "INSERT INTO contract VALUES (?,?,?,?,?)", rows);
  rows.clear();
  for (size_t i = 0; i < codenames.size(); ++i) {
    const char* st = i % 3 == 0 ? "A" : rng.chance(50) ? "A" : rng.chance(50) ? "C" : "H";
    rows.push_back({static_cast<std::int64_t>(i + 1), "Project " + codenames[i],
                    static_cast<std::int64_t>(5001 + rng.below(contract_customer.size())), st,
                    random_date(rng, 2020, 4)});
  }
  insert_rows(db, "INSERT INTO p_number VALUES (?,?,?,?,?)", rows);
  rows.clear();
  auto staff = person_names(rng, 20);
  for (size_t i = 0; i < 80; ++i)
    rows.push_back({static_cast<std::int64_t>(i + 1), static_cast<std::int64_t>(1 + rng.below(codenames.size())),
                    staff[i % staff.size()], rng.pick(roles), static_cast<double>(1 + rng.below(160)) / 2.0});
  insert_rows(db, "INSERT INTO assignment VALUES (?,?,?,?,?)", rows);
  rows.clear();
  for (size_t i = 0; i < 180; ++i) {
    const size_t c = rng.below(contract_customer.size());
    rows.push_back({static_cast<std::int64_t>(9001 + i), static_cast<std::int64_t>(5001 + c), contract_customer[c],
                    cents(rng, 100, 9900), statuses[i % statuses.size()], rng.chance(70) ? "Y" : "N",
                    random_date(rng, 2022, 3)});
  }
  insert_rows(db, "INSERT INTO inv VALUES (?,?,?,?,?,?,?)", rows);
}

}  // namespace

void create_fixture_db(DbKind kind, std::uint64_t seed, const std::string& path) {
  auto db = db::Database::create(path);
  Rng rng(seed * 1000003 + static_cast<std::uint64_t>(kind));
  db.exec("BEGIN");
  switch (kind) {
    case DbKind::HR: create_hr(db, rng); break;
    case DbKind::WH: create_wh(db, rng); break;
    case DbKind::IN: create_in(db, rng); break;
  }
  db.exec("COMMIT");
}

// --------------------------------------------------------------- templates

namespace {

struct Template {
  const char* question;
  const char* sql;
};

// Slots are {X}; {X2} draws from the same pool as {X} but differs from it.
const std::vector<Template>& templates(DbKind db, Variant v) {
  static const std::vector<Template> hr{
      {"List the names of employees in the {D} department.", "SELECT name FROM employees WHERE dept = '{D}'"},
      {"How many employees work in {D}?", "SELECT count(*) FROM employees WHERE dept = '{D}'"},
      {"What is the average salary in the {D} department?", "SELECT avg(salary) FROM employees WHERE dept = '{D}'"},
      {"What is the highest salary in {D}?", "SELECT max(salary) FROM employees WHERE dept = '{D}'"},
      {"Who earns more than {S}?", "SELECT name FROM employees WHERE salary > {S}"},
      {"Which employees in {D} earn more than {S}?", "SELECT name FROM employees WHERE dept = '{D}' AND salary > {S}"},
      {"What is the salary of {N}?", "SELECT salary FROM employees WHERE name = '{N}'"},
      {"When was {N} hired?", "SELECT hire_date FROM employees WHERE name = '{N}'"},
      {"Who is the manager of {N}?",
       "SELECT T2.name FROM employees AS T1 JOIN employees AS T2 ON T1.manager = T2.emp_no WHERE T1.name = '{N}'"},
      {"How many employees are in each department?", "SELECT dept, count(*) FROM employees GROUP BY dept"},
      {"List departments with more than {K} employees.",
       "SELECT dept FROM employees GROUP BY dept HAVING count(*) > {K}"},
      {"Which employees were hired after {Y}?", "SELECT name FROM employees WHERE hire_date > '{Y}-12-31'"},
      {"Who has left the company?", "SELECT name FROM employees WHERE leave_date IS NOT NULL"},
      {"Show the top {K} earners.", "SELECT name, salary FROM employees ORDER BY salary DESC LIMIT {K}"},
      {"What is the total bonus paid to {D} employees?", "SELECT sum(bonus) FROM employees WHERE dept = '{D}'"},
      {"Who earns between {S} and {H}?", "SELECT name FROM employees WHERE salary BETWEEN {S} AND {H}"},
      {"List employees in {D} or {D2}.", "SELECT name FROM employees WHERE dept = '{D}' OR dept = '{D2}'"},
      {"Which employees earn more than the average salary?",
       "SELECT name FROM employees WHERE salary > (SELECT avg(salary) FROM employees)"},
      {"Who earns more than {N}?",
       "SELECT name FROM employees WHERE salary > (SELECT salary FROM employees WHERE name = '{N}')"},
      {"List employees of {D} hired before {Y}.",
       "SELECT name, hire_date FROM employees WHERE dept = '{D}' AND hire_date < '{Y}-01-01'"},
      {"How many employees report to {M}?",
       "SELECT count(*) FROM employees WHERE manager IN (SELECT emp_no FROM employees WHERE name = '{M}')"},
      {"Which employees in {D} have a bonus above {B}?",
       "SELECT name, bonus FROM employees WHERE dept = '{D}' AND bonus > {B}"},
      {"Which employees have a name starting with {L}?", "SELECT name FROM employees WHERE name LIKE '{L}%'"},
      {"What is the average bonus per department?", "SELECT dept, avg(bonus) FROM employees GROUP BY dept"},
      {"Who still works in {D}?", "SELECT name FROM employees WHERE dept = '{D}' AND leave_date IS NULL"},
      {"When did {N} leave?", "SELECT leave_date FROM employees WHERE name = '{N}' AND leave_date IS NOT NULL"},
      {"List the {D} employees ordered by hire date.",
       "SELECT name, hire_date FROM employees WHERE dept = '{D}' ORDER BY hire_date"},
      {"Which departments have an average salary above {S}?",
       "SELECT dept FROM employees GROUP BY dept HAVING avg(salary) > {S}"},
      {"What is the birthdate of {N}?", "SELECT birthdate FROM employees WHERE name = '{N}'"},
      {"Who are the employees managed by {M} in {D}?",
       "SELECT T1.name FROM employees AS T1 JOIN employees AS T2 ON T1.manager = T2.emp_no WHERE T2.name = '{M}' AND "
       "T1.dept = '{D}'"},
  };
  static const std::vector<Template> hr_with{
      {"Which employees earn more than the average salary of the {D} department?",
       "WITH d AS (SELECT avg(salary) AS avg_sal FROM employees WHERE dept = '{D}') SELECT name FROM employees, d "
       "WHERE salary > d.avg_sal"},
      {"Which departments pay a higher average salary than {D}?",
       "WITH a AS (SELECT dept, avg(salary) AS avg_sal FROM employees GROUP BY dept) SELECT dept FROM a WHERE "
       "avg_sal > (SELECT avg_sal FROM a WHERE dept = '{D}')"},
      {"Who earns more than {N}?",
       "WITH n AS (SELECT salary FROM employees WHERE name = '{N}') SELECT e.name FROM employees AS e JOIN n ON "
       "e.salary > n.salary"},
      {"Which employees in {D} earn more than their department average?",
       "WITH s AS (SELECT avg(salary) AS avg_sal FROM employees WHERE dept = '{D}') SELECT name, salary FROM "
       "employees JOIN s ON employees.salary > s.avg_sal WHERE dept = '{D}'"},
      {"Compare the headcount of {D} and {D2}.",
       "WITH c AS (SELECT dept, count(*) AS n FROM employees GROUP BY dept) SELECT dept, n FROM c WHERE dept = "
       "'{D}' OR dept = '{D2}'"},
      {"Which employees were hired before {N}?",
       "WITH h AS (SELECT hire_date FROM employees WHERE name = '{N}') SELECT e.name FROM employees AS e JOIN h ON "
       "e.hire_date < h.hire_date"},
      {"Who has a higher bonus than {N}?",
       "WITH b AS (SELECT bonus FROM employees WHERE name = '{N}') SELECT e.name, e.bonus FROM employees AS e JOIN b "
       "ON e.bonus > b.bonus"},
  };
  static const std::vector<Template> wh{
      {"List products in the {C} category.", "SELECT name FROM products WHERE category = '{C}'"},
      {"How many products have price higher than {P}?",
       "SELECT count(DISTINCT product_id) FROM products WHERE price > {P}"},
      {"What is the price of {PN}?", "SELECT price FROM products WHERE name = '{PN}'"},
      {"Which products are made by {M}?",
       "SELECT T1.name FROM products AS T1 JOIN manufacturers AS T2 ON T1.manufacturer_id = T2.manufacturer_id "
       "WHERE T2.name = '{M}'"},
      {"Which shops are in {CI}?", "SELECT name FROM shops WHERE city = '{CI}'"},
      {"How many customers live in {CI}?", "SELECT count(*) FROM customers WHERE city = '{CI}'"},
      {"What is the total sales amount of {S}?",
       "SELECT sum(T1.total) FROM sales AS T1 JOIN shops AS T2 ON T1.shop_id = T2.shop_id WHERE T2.name = '{S}'"},
      {"How many units of {PN} does {S} have in stock?",
       "SELECT T1.quantity FROM stock AS T1 JOIN products AS T2 ON T1.product_id = T2.product_id JOIN shops AS T3 "
       "ON T1.shop_id = T3.shop_id WHERE T2.name = '{PN}' AND T3.name = '{S}'"},
      {"List the vendors based in {CI}.", "SELECT name FROM vendors WHERE city = '{CI}'"},
      {"What is the average price of {C} products?", "SELECT avg(price) FROM products WHERE category = '{C}'"},
      {"Which customers bought from {S}?",
       "SELECT DISTINCT T1.name FROM customers AS T1 JOIN sales AS T2 ON T1.customer_id = T2.customer_id JOIN shops "
       "AS T3 ON T2.shop_id = T3.shop_id WHERE T3.name = '{S}'"},
      {"How many purchases did {CU} make?",
       "SELECT count(*) FROM sales AS T1 JOIN customers AS T2 ON T1.customer_id = T2.customer_id WHERE T2.name = "
       "'{CU}'"},
      {"Which products cost less than {P}?", "SELECT name, price FROM products WHERE price < {P}"},
      {"List the {K} most expensive products.", "SELECT name FROM products ORDER BY price DESC LIMIT {K}"},
      {"How many products does each category have?", "SELECT category, count(*) FROM products GROUP BY category"},
      {"Which manufacturers are from {CO}?", "SELECT name FROM manufacturers WHERE country = '{CO}'"},
      {"Which products supplied by {V} cost more than {P}?",
       "SELECT T1.name FROM products AS T1 JOIN vendors AS T2 ON T1.vendor_id = T2.vendor_id WHERE T2.name = '{V}' "
       "AND T1.price > {P}"},
      {"Which sales happened after {DT}?", "SELECT sale_id, total FROM sales WHERE sale_date > '{DT}'"},
      {"How many units of {PN} were sold?",
       "SELECT sum(T1.quantity) FROM sales_details AS T1 JOIN products AS T2 ON T1.product_id = T2.product_id WHERE "
       "T2.name = '{PN}'"},
      {"Which categories have an average price above {P}?",
       "SELECT category FROM products GROUP BY category HAVING avg(price) > {P}"},
      {"Which products are not stocked at {S}?",
       "SELECT name FROM products WHERE product_id NOT IN (SELECT T1.product_id FROM stock AS T1 JOIN shops AS T2 "
       "ON T1.shop_id = T2.shop_id WHERE T2.name = '{S}')"},
      {"List customers from {CI} or {CI2}.", "SELECT name FROM customers WHERE city = '{CI}' OR city = '{CI2}'"},
      {"Which {C} products cost between {P} and {PH}?",
       "SELECT name FROM products WHERE category = '{C}' AND price BETWEEN {P} AND {PH}"},
      {"Which shops sold {PN}?",
       "SELECT DISTINCT T1.name FROM shops AS T1 JOIN sales AS T2 ON T1.shop_id = T2.shop_id JOIN sales_details AS "
       "T3 ON T2.sale_id = T3.sale_id JOIN products AS T4 ON T3.product_id = T4.product_id WHERE T4.name = '{PN}'"},
      {"Who supplies {PN}?",
       "SELECT T2.name FROM products AS T1 JOIN vendors AS T2 ON T1.vendor_id = T2.vendor_id WHERE T1.name = '{PN}'"},
      {"In which city is {S}?", "SELECT city FROM shops WHERE name = '{S}'"},
      {"What is the largest sale of {CU}?",
       "SELECT max(T1.total) FROM sales AS T1 JOIN customers AS T2 ON T1.customer_id = T2.customer_id WHERE "
       "T2.name = '{CU}'"},
      {"Which customers live in {CI} and bought more than {K} times?",
       "SELECT T1.name FROM customers AS T1 JOIN sales AS T2 ON T1.customer_id = T2.customer_id WHERE T1.city = "
       "'{CI}' GROUP BY T1.name HAVING count(*) > {K}"},
      {"List the {C} products ordered by price.",
       "SELECT name, price FROM products WHERE category = '{C}' ORDER BY price"},
  };
  static const std::vector<Template> wh_with{
      {"Which products cost more than the average price of {C} products?",
       "WITH a AS (SELECT avg(price) AS avg_price FROM products WHERE category = '{C}') SELECT p.name FROM products "
       "AS p JOIN a ON p.price > a.avg_price"},
      {"Which products are cheaper than {PN}?",
       "WITH r AS (SELECT price FROM products WHERE name = '{PN}') SELECT p.name FROM products AS p JOIN r ON "
       "p.price < r.price"},
      {"Which categories have more products than {C}?",
       "WITH c AS (SELECT category, count(*) AS n FROM products GROUP BY category) SELECT category FROM c WHERE n > "
       "(SELECT n FROM c WHERE category = '{C}')"},
      {"Which shops sold more than {S}?",
       "WITH t AS (SELECT shop_id, sum(total) AS amount FROM sales GROUP BY shop_id) SELECT T1.name FROM shops AS T1 "
       "JOIN t ON T1.shop_id = t.shop_id WHERE t.amount > (SELECT t2.amount FROM t AS t2 JOIN shops AS s2 ON "
       "t2.shop_id = s2.shop_id WHERE s2.name = '{S}')"},
  };
  static const std::vector<Template> in{
      {"Show outstanding invoices of {CU}.",
       "SELECT id, bill_amnt FROM inv WHERE (status = 'R' OR status = 'P' OR status = 'A' OR status = 'N' OR status "
       "= 'D') AND created = 'Y' AND cu_name = '{CU}'"},
      {"How many outstanding invoices exceed {A}?",
       "SELECT count(*) FROM inv WHERE (status = 'R' OR status = 'P' OR status = 'A' OR status = 'N' OR status = "
       "'D') AND created = 'Y' AND bill_amnt > {A}"},
      {"List invoices of {CU}.", "SELECT id, bill_amnt FROM inv WHERE cu_name = '{CU}'"},
      {"What is the total billed amount for contract {K}?", "SELECT sum(bill_amnt) FROM inv WHERE con_number = {K}"},
      {"Which contracts are {CS}?", "SELECT con_number FROM contract WHERE con_status = '{CS}'"},
      {"Who is assigned to {PN}?",
       "SELECT T1.emp_name FROM assignment AS T1 JOIN p_number AS T2 ON T1.p_id = T2.p_id WHERE T2.p_name = '{PN}'"},
      {"How many hours did {E} work?", "SELECT sum(hours) FROM assignment WHERE emp_name = '{E}'"},
      {"List invoices billed above {A}.", "SELECT id FROM inv WHERE bill_amnt > {A}"},
      {"Which projects belong to contracts of {CU}?",
       "SELECT T1.p_name FROM p_number AS T1 JOIN contract AS T2 ON T1.con_number = T2.con_number WHERE T2.cu_name "
       "= '{CU}'"},
      {"What is the address of {CU}?", "SELECT DISTINCT cus_address FROM contract WHERE cu_name = '{CU}'"},
      {"Which employees work as {R}?", "SELECT DISTINCT emp_name FROM assignment WHERE role = '{R}'"},
      {"How many invoices does each customer have?", "SELECT cu_name, count(*) FROM inv GROUP BY cu_name"},
      {"Which invoices of {CU} were returned or rejected?",
       "SELECT id FROM inv WHERE (status = 'RT' OR status = 'RJ') AND cu_name = '{CU}'"},
      {"List the invoices issued after {DT}.", "SELECT id, p_date FROM inv WHERE p_date > '{DT}'"},
      {"What is the average invoice amount of {CU}?", "SELECT avg(bill_amnt) FROM inv WHERE cu_name = '{CU}'"},
      {"Which open projects does contract {K} have?",
       "SELECT p_name FROM p_number WHERE con_number = {K} AND status = 'A'"},
      {"Who worked more than {H} hours on {PN}?",
       "SELECT T1.emp_name FROM assignment AS T1 JOIN p_number AS T2 ON T1.p_id = T2.p_id WHERE T2.p_name = '{PN}' "
       "AND T1.hours > {H}"},
      {"Show outstanding invoices above {A}.",
       "SELECT id, bill_amnt FROM inv WHERE (status = 'R' OR status = 'P' OR status = 'A' OR status = 'N' OR status "
       "= 'D') AND created = 'Y' AND bill_amnt > {A}"},
      {"What is the total outstanding amount of {CU}?",
       "SELECT sum(bill_amnt) FROM inv WHERE (status = 'R' OR status = 'P' OR status = 'A' OR status = 'N' OR status "
       "= 'D') AND created = 'Y' AND cu_name = '{CU}'"},
      {"Which customers have open contracts?", "SELECT DISTINCT cu_name FROM contract WHERE con_status = 'Open'"},
      {"How many projects are in status {PS}?", "SELECT count(*) FROM p_number WHERE status = '{PS}'"},
      {"List the {K} largest invoices.", "SELECT id, bill_amnt FROM inv ORDER BY bill_amnt DESC LIMIT {K}"},
      {"Which invoices of {CU} are paid?", "SELECT id FROM inv WHERE cu_name = '{CU}' AND status = 'C'"},
      {"How many hours were logged on {PN}?",
       "SELECT sum(T1.hours) FROM assignment AS T1 JOIN p_number AS T2 ON T1.p_id = T2.p_id WHERE T2.p_name = '{PN}'"},
      {"Which projects does {E} work on?",
       "SELECT DISTINCT T2.p_name FROM assignment AS T1 JOIN p_number AS T2 ON T1.p_id = T2.p_id WHERE T1.emp_name "
       "= '{E}'"},
      {"Which invoices were issued under contracts started before {DT}?",
       "SELECT T1.id FROM inv AS T1 JOIN contract AS T2 ON T1.con_number = T2.con_number WHERE T2.start_date < "
       "'{DT}'"},
  };
  switch (db) {
    case DbKind::HR: return v == Variant::With ? hr_with : hr;
    case DbKind::WH: return v == Variant::With ? wh_with : wh;
    case DbKind::IN: return in;
  }
  return hr;
}

/// Fixed pairs that every corpus of a database carries: the published worked
/// linker example and the two grounding replicas.
std::vector<std::pair<std::string, std::string>> anchors(DbKind db, Variant v) {
  if (v == Variant::With) return {};
  if (db == DbKind::WH)
    return {{"How many products have price higher than 100?",
             "SELECT count(DISTINCT product_id) FROM products WHERE price > 100"}};
  if (db == DbKind::IN)
    return {{"What projects are open?", "SELECT DISTINCT p_id FROM p_number WHERE status = 'A'"},
            {"Show outstanding invoices",
             "SELECT id, bill_amnt FROM inv WHERE (status = 'RT' OR status = 'RJ' OR status = 'P' OR status = 'A') "
             "AND created = 'Y'"}};
  return {};
}

std::vector<std::string> column_values(db::Database& db, const std::string& sql) {
  std::vector<std::string> out;
  for (const auto& row : db.query(sql).rows) {
    const auto& c = row[0];
    if (auto* s = std::get_if<std::string>(&c)) out.push_back(*s);
    else if (auto* i = std::get_if<std::int64_t>(&c)) out.push_back(std::to_string(*i));
  }
  return out;
}

std::vector<std::string> range(int from, int to, int step) {
  std::vector<std::string> v;
  for (int x = from; x <= to; x += step) v.push_back(std::to_string(x));
  return v;
}

using Pools = std::map<std::string, std::vector<std::string>>;

Pools load_pools(DbKind kind, db::Database& db) {
  Pools p;
  p["K"] = range(2, 9, 1);
  switch (kind) {
    case DbKind::HR:
      p["D"] = column_values(db, "SELECT DISTINCT dept FROM employees ORDER BY dept");
      p["N"] = column_values(db, "SELECT name FROM employees ORDER BY emp_no");
      p["M"] = column_values(db, "SELECT name FROM employees WHERE emp_no IN (SELECT manager FROM employees) ORDER BY emp_no");
      p["S"] = range(45000, 120000, 5000);
      p["H"] = range(100000, 150000, 10000);
      p["B"] = range(2000, 15000, 1000);
      p["Y"] = range(2003, 2019, 1);
      p["L"] = {"A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M", "N", "O", "P", "R", "S", "T"};
      break;
    case DbKind::WH:
      p["C"] = column_values(db, "SELECT DISTINCT category FROM products ORDER BY category");
      p["PN"] = column_values(db, "SELECT name FROM products ORDER BY product_id");
      p["M"] = column_values(db, "SELECT name FROM manufacturers ORDER BY manufacturer_id");
      p["CI"] = column_values(db, "SELECT DISTINCT city FROM customers ORDER BY city");
      p["S"] = column_values(db, "SELECT name FROM shops ORDER BY shop_id");
      p["CU"] = column_values(db, "SELECT name FROM customers ORDER BY customer_id");
      p["V"] = column_values(db, "SELECT name FROM vendors ORDER BY vendor_id");
      p["CO"] = column_values(db, "SELECT DISTINCT country FROM manufacturers ORDER BY country");
      p["P"] = range(20, 400, 20);
      p["PH"] = range(300, 500, 50);
      p["DT"] = {"2023-03-01", "2023-06-15", "2023-09-30", "2024-01-01", "2024-04-15", "2024-08-01"};
      break;
    case DbKind::IN:
      p["CU"] = column_values(db, "SELECT DISTINCT cu_name FROM contract ORDER BY cu_name");
      p["K"] = column_values(db, "SELECT con_number FROM contract ORDER BY con_number");
      p["CS"] = {"Open", "Closed"};
      p["PN"] = column_values(db, "SELECT p_name FROM p_number ORDER BY p_id");
      p["E"] = column_values(db, "SELECT DISTINCT emp_name FROM assignment ORDER BY emp_name");
      p["R"] = column_values(db, "SELECT DISTINCT role FROM assignment ORDER BY role");
      p["PS"] = {"A", "C", "H"};
      p["A"] = range(500, 9000, 500);
      p["H"] = range(5, 60, 5);
      p["DT"] = {"2020-01-01", "2021-06-30", "2022-03-15", "2022-09-01", "2023-01-01", "2023-07-01", "2024-01-01"};
      break;
  }
  return p;
}

std::string sql_escape(const std::string& v) {
  std::string out;
  for (char c : v) {
    out += c;
    if (c == '\'') out += '\'';
  }
  return out;
}

/// Fills every {SLOT} in both strings. Returns nullopt when a pool is
/// too small to give distinct values.
std::optional<std::pair<std::string, std::string>> instantiate(const Template& t, const Pools& pools, Rng& rng) {
  std::map<std::string, std::string> chosen;
  auto fill = [&](std::string_view pattern, bool sql) {
    std::string out;
    for (size_t i = 0; i < pattern.size();) {
      if (pattern[i] != '{') {
        out += pattern[i++];
        continue;
      }
      size_t close = pattern.find('}', i);
      std::string slot(pattern.substr(i + 1, close - i - 1));
      if (!chosen.count(slot)) {
        std::string pool = slot;
        if (!pool.empty() && pool.back() == '2') pool.pop_back();
        const auto& values = pools.at(pool);
        std::string v = rng.pick(values);
        if (pool != slot) {
          for (int tries = 0; tries < 20 && chosen.count(pool) && v == chosen[pool]; ++tries) v = rng.pick(values);
        }
        chosen[slot] = v;
      }
      out += sql ? sql_escape(chosen[slot]) : chosen[slot];
      i = close + 1;
    }
    return out;
  };
  std::string q = fill(t.question, false);
  std::string s = fill(t.sql, true);
  for (const auto& [slot, v] : chosen)
    if (slot.back() == '2' && chosen.count(slot.substr(0, slot.size() - 1)) && chosen[slot.substr(0, slot.size() - 1)] == v)
      return std::nullopt;
  return std::make_pair(q, s);
}

}  // namespace

// ------------------------------------------------------------ Fnc rewrite

namespace {

struct FncRel {
  std::string key;
  const Table* table = nullptr;  // null for CTEs and derived tables
};

class FncRewriter {
 public:
  FncRewriter(std::string_view sql, const SchemaCatalog& catalog) : sql_(sql), catalog_(catalog) {}

  std::vector<std::pair<std::pair<size_t, size_t>, std::string>> edits;

  void statement(const Statement& st) {
    for (const auto& c : st.ctes) {
      query(c.body, {});
      ctes_.push_back(to_lower(c.name));
    }
    query(st.query, {});
  }

 private:
  using Scopes = std::vector<std::vector<FncRel>>;

  void query(const Query& q, Scopes scopes) {
    Scopes last = scopes;
    for (const auto& s : q.selects) last = select(s, scopes);
    for (const auto& o : q.order_by) expr(o.expr, last);
  }

  FncRel relation(const TableRef& t, const Scopes& outer) {
    FncRel r{to_lower(t.visible_name()), nullptr};
    if (t.subquery) {
      query(*t.subquery, outer);
    } else if (std::find(ctes_.begin(), ctes_.end(), to_lower(t.name)) == ctes_.end()) {
      r.table = catalog_.table(t.name);
    }
    return r;
  }

  Scopes select(const Select& s, Scopes scopes) {
    std::vector<FncRel> rels;
    rels.push_back(relation(s.from, scopes));
    for (const auto& j : s.joins) rels.push_back(relation(j.table, scopes));
    scopes.push_back(std::move(rels));
    for (const auto& j : s.joins)
      if (j.on) expr(*j.on, scopes);
    for (const auto& item : s.items) expr(item.expr, scopes);
    if (s.where) expr(*s.where, scopes);
    for (const auto& g : s.group_by) expr(g, scopes);
    if (s.having) expr(*s.having, scopes);
    return scopes;
  }

  bool text_column(const Expr& e, const Scopes& scopes) const {
    if (e.kind != ExprKind::Column) return false;
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      const Column* hit = nullptr;
      size_t owners = 0;
      for (const auto& r : *it) {
        if (!e.qualifier.empty() && r.key != to_lower(e.qualifier)) continue;
        if (!r.table) {
          if (!e.qualifier.empty()) return false;
          continue;
        }
        if (auto c = r.table->find_column(e.name)) {
          hit = &r.table->columns[*c];
          ++owners;
        }
      }
      if (owners == 1) return hit->type == DataType::Text;
      if (owners > 1) return false;
    }
    return false;
  }

  std::string src(const Expr& e) const { return std::string(sql_.substr(e.begin, e.end - e.begin)); }

  void expr(const Expr& e, const Scopes& scopes) {
    if (e.kind == ExprKind::Compare && e.op == "=" && e.args.size() == 2) {
      const Expr& a = e.args[0];
      const Expr& b = e.args[1];
      const bool ab = text_column(a, scopes) && b.kind == ExprKind::String;
      const bool ba = text_column(b, scopes) && a.kind == ExprKind::String;
      if (ab || ba) {
        std::string lhs = "lower(trim(" + src(a) + "))";
        std::string rhs = "lower(trim(" + src(b) + "))";
        std::string op(sql_.substr(a.end, b.begin - a.end));
        edits.push_back({{e.begin, e.end}, lhs + op + rhs});
        return;
      }
    }
    for (const auto& x : e.args) expr(x, scopes);
    if (e.query) query(*e.query, scopes);
  }

  std::string_view sql_;
  const SchemaCatalog& catalog_;
  std::vector<std::string> ctes_;
};

}  // namespace

std::string apply_fnc_to_sql(std::string_view sql, const SchemaCatalog& catalog) {
  Statement st = parse_complete(sql, Profile::Extended);
  FncRewriter rw(sql, catalog);
  rw.statement(st);
  auto edits = rw.edits;
  std::sort(edits.begin(), edits.end(), [](const auto& a, const auto& b) { return a.first.first > b.first.first; });
  std::string out(sql);
  for (const auto& [span, text] : edits) out.replace(span.first, span.second - span.first, text);
  return out;
}

std::vector<CorpusRecord> apply_fnc_transform(const std::vector<CorpusRecord>& corpus, const SchemaCatalog& catalog) {
  std::vector<CorpusRecord> out = corpus;
  for (auto& r : out) r.gold = apply_fnc_to_sql(r.gold, catalog);
  return out;
}

// ---------------------------------------------------------------- records

std::string record_to_json(const CorpusRecord& r) {
  nlohmann::ordered_json j;
  j["question"] = r.question;
  j["gold"] = r.gold;
  j["db_id"] = r.db_id;
  if (r.pred) j["pred"] = *r.pred;
  return j.dump();
}

std::string corpus_to_jsonl(const std::vector<CorpusRecord>& records) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r) + "\n";
  return out;
}

std::vector<CorpusRecord> parse_corpus(std::string_view text, bool validate) {
  std::vector<CorpusRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  for (size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (trim(line).empty()) continue;
    auto where = [&](const std::string& why) { return FormatError("corpus line " + std::to_string(lineno) + ": " + why); };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw where(std::string("not JSON (") + e.what() + ")");
    }
    if (!j.is_object() || !j.contains("question") || !j["question"].is_string() || !j.contains("gold") ||
        !j["gold"].is_string())
      throw where("record needs string fields question and gold");
    CorpusRecord r;
    r.question = j["question"].get<std::string>();
    r.gold = j["gold"].get<std::string>();
    if (j.contains("db_id") && j["db_id"].is_string()) r.db_id = j["db_id"].get<std::string>();
    if (j.contains("pred") && j["pred"].is_string()) r.pred = j["pred"].get<std::string>();
    if (validate) try {
      parse_complete(r.gold, Profile::Extended);
    } catch (const SyntaxError& e) {
      throw where(std::string("gold does not parse: ") + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CorpusRecord> load_corpus(const std::string& path) { return parse_corpus(read_file(path)); }

// ---------------------------------------------------------------- generate

GeneratedCorpus generate(const CorpusSpec& spec, const std::string& out_dir) {
  if (spec.splits.train == 0 || spec.splits.dev == 0 || spec.splits.test == 0)
    throw ConfigError("split counts must be positive");
  if (spec.variant == Variant::With && spec.db == DbKind::IN) throw ConfigError("no WITH corpus for the IN database");
  std::filesystem::create_directories(out_dir);
  const std::string id(fixture_db_id(spec.db));
  const std::string prefix = std::string(db_kind_name(spec.db)) + "_" + std::string(variant_name(spec.variant));
  const auto dir = std::filesystem::path(out_dir);

  GeneratedCorpus out;
  out.db_path = (dir / (id + ".sqlite")).string();
  out.schema_path = (dir / (id + ".json")).string();
  create_fixture_db(spec.db, spec.seed, out.db_path);
  const SchemaCatalog catalog = load_db_schema(out.db_path);
  write_file(out.schema_path, to_spider_json(catalog));
  out.dictionary_path = (dir / (id + "_dict.json")).string();
  write_file(out.dictionary_path, build_value_dictionary(catalog, out.db_path).to_json());

  auto db = db::Database::open_readonly(out.db_path);
  const Pools pools = load_pools(spec.db, db);
  const auto& pool = templates(spec.db, spec.variant);
  Rng rng(spec.seed * 7919 + static_cast<std::uint64_t>(spec.variant) * 31 + static_cast<std::uint64_t>(spec.db));

  const size_t want = spec.splits.total();
  std::vector<CorpusRecord> records;
  std::set<std::string> seen;
  auto offer = [&](std::string question, std::string sql) {
    if (spec.variant == Variant::Fnc) {
      std::string rewritten = apply_fnc_to_sql(sql, catalog);
      if (rewritten == sql) return;  // nothing to rewrite: not a Fnc example
      sql = std::move(rewritten);
    }
    if (!seen.insert(sql).second) return;
    if (db.query(sql).rows.empty()) return;
    records.push_back(CorpusRecord{std::move(question), std::move(sql), id, std::nullopt});
  };
  for (auto& [q, s] : anchors(spec.db, spec.variant))
    if (records.size() < want) offer(q, s);
  const size_t max_attempts = 400 * want;
  for (size_t attempt = 0; records.size() < want; ++attempt) {
    if (attempt >= max_attempts)
      throw GenerationError("template pool for " + prefix + " exhausted after " + std::to_string(records.size()) +
                            " of " + std::to_string(want) + " pairs");
    auto pair = instantiate(rng.pick(pool), pools, rng);
    if (pair) offer(std::move(pair->first), std::move(pair->second));
  }
  rng.shuffle(records);

  auto take = [&](size_t from, size_t n) {
    return std::vector<CorpusRecord>(records.begin() + static_cast<std::ptrdiff_t>(from),
                                     records.begin() + static_cast<std::ptrdiff_t>(from + n));
  };
  out.train = take(0, spec.splits.train);
  out.dev = take(spec.splits.train, spec.splits.dev);
  out.test = take(spec.splits.train + spec.splits.dev, spec.splits.test);
  out.train_path = (dir / (prefix + "_train.jsonl")).string();
  out.dev_path = (dir / (prefix + "_dev.jsonl")).string();
  out.test_path = (dir / (prefix + "_test.jsonl")).string();
  out.manifest_path = (dir / (prefix + "_manifest.json")).string();
  write_file(out.train_path, corpus_to_jsonl(out.train));
  write_file(out.dev_path, corpus_to_jsonl(out.dev));
  write_file(out.test_path, corpus_to_jsonl(out.test));

  nlohmann::ordered_json m;
  m["db"] = db_kind_name(spec.db);
  m["db_id"] = id;
  m["variant"] = variant_name(spec.variant);
  m["seed"] = spec.seed;
  m["splits"] = {{"train", spec.splits.train}, {"dev", spec.splits.dev}, {"test", spec.splits.test}};
  auto name = [](const std::string& p) { return std::filesystem::path(p).filename().string(); };
  m["files"] = {{"db", name(out.db_path)},       {"schema", name(out.schema_path)},
                {"dictionary", name(out.dictionary_path)}, {"train", name(out.train_path)},
                {"dev", name(out.dev_path)},     {"test", name(out.test_path)}};
  write_file(out.manifest_path, m.dump(2) + "\n");
  return out;
}

}  // namespace sqlgate
