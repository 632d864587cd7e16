#include "webagent/fixtures/site_server.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "webagent/fixtures/dom.hpp"
#include "webagent/text_util.hpp"

namespace webagent::fixtures {

using nlohmann::json;

namespace {

struct Product {
  std::string sku, name, price, image, description;
};

struct Listing {
  int id = 0;
  std::string title, price, category, image, description, seller;
};

struct Comment {
  std::string author, text;
};

struct Post {
  int id = 0;
  std::string title, author, image, body;
  std::vector<Comment> comments;
};

struct User {
  std::string name, bio;
};

struct State {
  std::vector<Product> products;
  std::vector<Listing> listings;
  std::vector<Post> posts;
  std::vector<User> users;
  std::vector<std::string> cart;
  std::vector<std::vector<std::string>> orders;
  std::vector<std::string> wishlist;
  std::vector<int> favorites;
};

std::string h(std::string_view s) { return escape_html(s); }

State load_state(const json& j) {
  State s;
  for (const auto& p : j.at("shop").at("products")) {
    s.products.push_back({p.at("sku"), p.at("name"), p.at("price"), p.at("image"), p.value("description", "")});
  }
  for (const auto& l : j.at("classifieds").at("listings")) {
    s.listings.push_back({l.at("id"), l.at("title"), l.at("price"), l.value("category", ""), l.at("image"),
                          l.value("description", ""), l.value("seller", "")});
  }
  for (const auto& p : j.at("forum").at("posts")) {
    Post post{p.at("id"), p.at("title"), p.at("author"), p.value("image", ""), p.value("body", ""), {}};
    for (const auto& c : p.value("comments", json::array())) post.comments.push_back({c.at("author"), c.at("text")});
    s.posts.push_back(std::move(post));
  }
  for (const auto& u : j.at("forum").value("users", json::array())) s.users.push_back({u.at("name"), u.at("bio")});
  return s;
}

bool matches_query(const std::string& text, const std::string& query) {
  std::string t = to_lower(text);
  for (const auto& word : split(to_lower(trim(query)), " ")) {
    if (!word.empty() && t.find(word) == std::string::npos) return false;
  }
  return true;
}

struct SiteChrome {
  std::string prefix;
  std::string name;
  std::vector<std::pair<std::string, std::string>> nav;
};

std::string page(const SiteChrome& site, const std::string& title, const std::string& body,
                 const std::string& query = "") {
  std::string out = "<!DOCTYPE html>\n<html><head><title>" + h(title) + " - " + h(site.name) +
                    "</title></head>\n<body>\n<header>\n<h2><a href=\"" + site.prefix + "/\">" + h(site.name) +
                    "</a></h2>\n<nav>";
  for (std::size_t i = 0; i < site.nav.size(); ++i) {
    if (i) out += " | ";
    out += "<a href=\"" + site.prefix + site.nav[i].second + "\">" + h(site.nav[i].first) + "</a>";
  }
  out += "</nav>\n<form action=\"" + site.prefix + "/search\" method=\"get\"><input type=\"search\" name=\"q\" value=\"" +
         h(query) + "\" aria-label=\"Search " + h(site.name) + "\"> <button type=\"submit\">Search</button></form>\n";
  out += "</header>\n<main>\n" + body + "</main>\n<footer><p class=\"muted\">" + h(site.name) +
         " demo site</p></footer>\n</body></html>\n";
  return out;
}

}  // namespace

struct SiteServer::Impl {
  json data;
  std::string media_dir;
  State state;
  std::mutex mu;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  SiteChrome shop{"/shop", "", {{"Home", "/"}, {"My Orders", "/orders"}, {"Wish List", "/wishlist"}, {"Cart", "/cart"}}};
  SiteChrome classifieds{"/classifieds", "", {{"Home", "/"}, {"Favorites", "/favorites"}}};
  SiteChrome forum{"/forum", "", {{"Front page", "/"}, {"Users", "/users"}}};

  const Product* product(const std::string& sku) const {
    for (const auto& p : state.products) {
      if (p.sku == sku) return &p;
    }
    return nullptr;
  }
  Listing* listing(int id) {
    for (auto& l : state.listings) {
      if (l.id == id) return &l;
    }
    return nullptr;
  }
  Post* post(int id) {
    for (auto& p : state.posts) {
      if (p.id == id) return &p;
    }
    return nullptr;
  }

  // ---- shop

  std::string product_card(const Product& p) const {
    return "<div class=\"card product-item\"><a href=\"/shop/product/" + p.sku + "\"><img class=\"product-image-photo\" src=\"/shop/media/" +
           p.image + "\" alt=\"" + h(p.name) + "\" width=\"120\" height=\"120\"></a>\n<a class=\"product-item-link\" href=\"/shop/product/" +
           p.sku + "\">" + h(p.name) + "</a> <span class=\"price\">$" + p.price + "</span></div>\n";
  }

  std::string shop_home() const {
    std::string body = "<h1>Featured products</h1>\n<div class=\"products-grid\">\n";
    for (const auto& p : state.products) body += product_card(p);
    return page(shop, "Home", body + "</div>\n");
  }

  std::string shop_search(const std::string& q) const {
    std::string body = "<h1>Search results for '" + h(q) + "'</h1>\n<div class=\"products-grid\">\n";
    int n = 0;
    for (const auto& p : state.products) {
      if (matches_query(p.name, q)) {
        body += product_card(p);
        ++n;
      }
    }
    if (n == 0) body += "<p>Your search returned no results.</p>\n";
    return page(shop, "Search results", body + "</div>\n", q);
  }

  std::string shop_product(const Product& p) const {
    std::string body = "<h1 class=\"page-title\">" + h(p.name) + "</h1>\n<img class=\"product-image-photo\" src=\"/shop/media/" + p.image +
                       "\" alt=\"" + h(p.name) + "\" width=\"240\" height=\"240\">\n<p><span class=\"price\">$" + p.price +
                       "</span></p>\n<p class=\"sku\">SKU: " + p.sku + "</p>\n<p>" + h(p.description) + "</p>\n";
    body += "<form action=\"/shop/cart/add\" method=\"post\"><input type=\"hidden\" name=\"sku\" value=\"" + p.sku +
            "\"><button type=\"submit\">Add to Cart</button></form>\n";
    body += "<form action=\"/shop/wishlist/add\" method=\"post\"><input type=\"hidden\" name=\"sku\" value=\"" + p.sku +
            "\"><button type=\"submit\">Add to Wish List</button></form>\n";
    return page(shop, p.name, body);
  }

  std::string shop_cart() const {
    std::string body = "<h1>Shopping Cart</h1>\n";
    if (state.cart.empty()) return page(shop, "Shopping Cart", body + "<p>You have no items in your shopping cart.</p>\n");
    body += "<ul class=\"cart-items\">\n";
    for (const auto& sku : state.cart) {
      const Product* p = product(sku);
      body += "<li>" + h(p->name) + " <span class=\"price\">$" + p->price + "</span></li>\n";
    }
    body += "</ul>\n<form action=\"/shop/checkout\" method=\"post\"><button type=\"submit\">Place Order</button></form>\n";
    return page(shop, "Shopping Cart", body);
  }

  static std::string order_number(std::size_t n) {
    std::string s = std::to_string(n);
    return std::string(s.size() < 9 ? 9 - s.size() : 0, '0') + s;
  }

  std::string shop_order(std::size_t n) const {
    const auto& items = state.orders[n - 1];
    std::string body = "<h1>Order # " + order_number(n) + "</h1>\n<div class=\"order-details\">\n";
    for (const auto& sku : items) {
      const Product* p = product(sku);
      body += "<p>SKU: " + sku + " | " + h(p->name) + " | $" + p->price + "</p>\n";
    }
    return page(shop, "Order # " + order_number(n), body + "</div>\n");
  }

  std::string shop_orders() const {
    std::string body = "<h1>My Orders</h1>\n";
    if (state.orders.empty()) return page(shop, "My Orders", body + "<p>You have placed no orders.</p>\n");
    body += "<ul class=\"orders\">\n";
    for (std::size_t n = state.orders.size(); n >= 1; --n) {
      body += "<li><a class=\"order-link\" href=\"/shop/order/" + std::to_string(n) + "\">Order # " + order_number(n) +
              "</a></li>\n";
    }
    return page(shop, "My Orders", body + "</ul>\n");
  }

  std::string shop_wishlist() const {
    std::string body = "<h1>My Wish List</h1>\n";
    if (state.wishlist.empty()) return page(shop, "My Wish List", body + "<p>You have no items in your wish list.</p>\n");
    body += "<div class=\"wishlist\">\n";
    for (const auto& sku : state.wishlist) body += product_card(*product(sku));
    return page(shop, "My Wish List", body + "</div>\n");
  }

  // ---- classifieds

  std::string listing_card(const Listing& l) const {
    return "<div class=\"card listing\"><a href=\"/classifieds/item/" + std::to_string(l.id) +
           "\"><img class=\"listing-image\" src=\"/classifieds/media/" + l.image + "\" alt=\"\" width=\"160\" height=\"120\"></a>\n<a href=\"/classifieds/item/" +
           std::to_string(l.id) + "\">" + h(l.title) + "</a> <span class=\"price\">$" + h(l.price) + "</span></div>\n";
  }

  std::string classifieds_home() const {
    std::string body = "<h1>Latest listings</h1>\n";
    for (const auto& l : state.listings) body += listing_card(l);
    return page(classifieds, "Home", body);
  }

  std::string classifieds_search(const std::string& q) const {
    std::string body = "<h1>Search results for '" + h(q) + "'</h1>\n";
    int n = 0;
    for (const auto& l : state.listings) {
      if (matches_query(l.title + " " + l.category, q)) {
        body += listing_card(l);
        ++n;
      }
    }
    if (n == 0) body += "<p>No listings found.</p>\n";
    return page(classifieds, "Search", body, q);
  }

  std::string classifieds_item(const Listing& l) const {
    std::string id = std::to_string(l.id);
    std::string body = "<h1>" + h(l.title) + "</h1>\n<img class=\"listing-image\" src=\"/classifieds/media/" + l.image +
                       "\" alt=\"\" width=\"320\" height=\"240\">\n<p class=\"listing-price\">$" + h(l.price) +
                       "</p>\n<p class=\"muted\">Category: " + h(l.category) + " | Seller: " + h(l.seller) + "</p>\n<p>" +
                       h(l.description) + "</p>\n";
    body += "<form action=\"/classifieds/favorites/add\" method=\"post\"><input type=\"hidden\" name=\"id\" value=\"" + id +
            "\"><button type=\"submit\">Add to favorites</button></form>\n";
    body += "<p><a href=\"/classifieds/item/" + id + "/edit\">Edit listing</a></p>\n";
    return page(classifieds, l.title, body);
  }

  std::string classifieds_edit(const Listing& l) const {
    std::string id = std::to_string(l.id);
    std::string body = "<h1>Edit listing</h1>\n<form action=\"/classifieds/item/" + id + "/edit\" method=\"post\">\n";
    body += "<p><label for=\"title\">Title</label> <input type=\"text\" id=\"title\" name=\"title\" value=\"" + h(l.title) +
            "\"></p>\n";
    body += "<p><label for=\"price\">Price</label> <input type=\"text\" id=\"price\" name=\"price\" value=\"" + h(l.price) +
            "\"></p>\n";
    body += "<p><label for=\"description\">Description</label> <textarea id=\"description\" name=\"description\">" +
            h(l.description) + "</textarea></p>\n";
    body += "<p><button type=\"submit\">Save</button></p>\n</form>\n";
    return page(classifieds, "Edit " + l.title, body);
  }

  std::string classifieds_favorites() const {
    std::string body = "<h1>Favorites</h1>\n";
    if (state.favorites.empty()) return page(classifieds, "Favorites", body + "<p>No favorite listings yet.</p>\n");
    body += "<div class=\"favorites\">\n";
    for (int id : state.favorites) {
      for (const auto& l : state.listings) {
        if (l.id == id) body += listing_card(l);
      }
    }
    return page(classifieds, "Favorites", body + "</div>\n");
  }

  // ---- forum

  std::string post_summary(const Post& p) const {
    std::string id = std::to_string(p.id);
    std::string out = "<div class=\"card post\">";
    if (!p.image.empty()) {
      out += "<a href=\"/forum/post/" + id + "\"><img class=\"thumbnail\" src=\"/forum/media/" + p.image +
             "\" alt=\"\" width=\"160\" height=\"160\"></a>\n";
    }
    out += "<a class=\"post-link\" href=\"/forum/post/" + id + "\">" + h(p.title) +
           "</a>\n<p class=\"muted\">submitted by <a href=\"/forum/user/" + h(p.author) + "\">" + h(p.author) + "</a> | " +
           std::to_string(p.comments.size()) + " comments</p></div>\n";
    return out;
  }

  std::string forum_home() const {
    std::string body = "<h1>Front page</h1>\n";
    for (const auto& p : state.posts) body += post_summary(p);
    return page(forum, "Front page", body);
  }

  std::string forum_search(const std::string& q) const {
    std::string body = "<h1>Search results for '" + h(q) + "'</h1>\n";
    int n = 0;
    for (const auto& p : state.posts) {
      if (matches_query(p.title + " " + p.body, q)) {
        body += post_summary(p);
        ++n;
      }
    }
    if (n == 0) body += "<p>No posts found.</p>\n";
    return page(forum, "Search", body, q);
  }

  std::string forum_post(const Post& p) const {
    std::string id = std::to_string(p.id);
    std::string body = "<article class=\"post\">\n<h1 class=\"post-title\">" + h(p.title) + "</h1>\n<p class=\"post-id\">Post #" +
                       id + "</p>\n<p class=\"muted\">submitted by <a href=\"/forum/user/" + h(p.author) + "\">" + h(p.author) +
                       "</a></p>\n";
    if (!p.image.empty()) {
      body += "<img class=\"post-image\" src=\"/forum/media/" + p.image + "\" alt=\"\" width=\"320\" height=\"320\">\n";
    }
    body += "<p>" + h(p.body) + "</p>\n</article>\n<h2>Comments</h2>\n<div class=\"comments\">";
    for (const auto& c : p.comments) {
      body += "<div class=\"comment\"><a class=\"comment-author\" href=\"/forum/user/" + h(c.author) + "\">" + h(c.author) +
              "</a><p class=\"comment-text\">" + h(c.text) + "</p></div>";
    }
    body += "</div>\n<form action=\"/forum/post/" + id +
            "/comment\" method=\"post\"><p><textarea name=\"text\" aria-label=\"Write a comment\"></textarea></p><p><button type=\"submit\">Post comment</button></p></form>\n";
    return page(forum, p.title, body);
  }

  std::string forum_user(const std::string& name) const {
    std::string body = "<h1>" + h(name) + "</h1>\n";
    for (const auto& u : state.users) {
      if (u.name == name) body += "<p class=\"bio\">" + h(u.bio) + "</p>\n";
    }
    body += "<h2>Submissions</h2>\n";
    for (const auto& p : state.posts) {
      if (p.author == name) body += post_summary(p);
    }
    return page(forum, name, body);
  }

  std::string forum_users() const {
    std::string body = "<h1>Users</h1>\n<ul>\n";
    for (const auto& u : state.users) {
      body += "<li><a href=\"/forum/user/" + h(u.name) + "\">" + h(u.name) + "</a></li>\n";
    }
    return page(forum, "Users", body + "</ul>\n");
  }

  std::string not_found(const SiteChrome& site) const {
    return page(site, "Page not found", "<h1>Page not found</h1>\n<p>The requested page does not exist.</p>\n");
  }

  void routes();
};

namespace {

void html(httplib::Response& res, const std::string& body, int status = 200) {
  res.status = status;
  res.set_content(body, "text/html; charset=utf-8");
}

void see_other(httplib::Response& res, const std::string& location) {
  res.status = 303;
  res.set_header("Location", location);
}

}  // namespace

void SiteServer::Impl::routes() {
  auto& s = server;

  s.Get(R"(/(shop|classifieds|forum)/media/([A-Za-z0-9_\-]+\.png))", [this](const httplib::Request& req,
                                                                         httplib::Response& res) {
    std::filesystem::path p = std::filesystem::path(media_dir) / req.matches[1].str() / req.matches[2].str();
    if (!std::filesystem::exists(p)) {
      res.status = 404;
      return;
    }
    res.set_content(read_file(p.string()), "image/png");
  });

  s.Post("/__reset", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    state = load_state(data);
    res.set_content("ok", "text/plain");
  });

  s.Get("/", [](const httplib::Request&, httplib::Response& res) {
    html(res,
         "<!DOCTYPE html>\n<html><head><title>Fixture sites</title></head><body><h1>Fixture sites</h1><ul>"
         "<li><a href=\"/shop/\">Shop</a></li><li><a href=\"/classifieds/\">Classifieds</a></li>"
         "<li><a href=\"/forum/\">Forum</a></li></ul></body></html>\n");
  });

  // shop
  s.Get(R"(/shop/?)", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, shop_home());
  });
  s.Get("/shop/search", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, shop_search(req.get_param_value("q")));
  });
  s.Get(R"(/shop/product/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    const Product* p = product(req.matches[1].str());
    html(res, p ? shop_product(*p) : not_found(shop), p ? 200 : 404);
  });
  s.Post("/shop/cart/add", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    std::string sku = req.get_param_value("sku");
    if (product(sku)) state.cart.push_back(sku);
    see_other(res, "/shop/cart");
  });
  s.Get("/shop/cart", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, shop_cart());
  });
  s.Post("/shop/checkout", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    if (state.cart.empty()) {
      see_other(res, "/shop/cart");
      return;
    }
    state.orders.push_back(state.cart);
    state.cart.clear();
    see_other(res, "/shop/order/" + std::to_string(state.orders.size()));
  });
  s.Get(R"(/shop/order/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    std::size_t n = std::stoul(req.matches[1].str());
    if (n == 0 || n > state.orders.size()) {
      html(res, not_found(shop), 404);
      return;
    }
    html(res, shop_order(n));
  });
  s.Get("/shop/orders", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, shop_orders());
  });
  s.Post("/shop/wishlist/add", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    std::string sku = req.get_param_value("sku");
    if (product(sku) && std::find(state.wishlist.begin(), state.wishlist.end(), sku) == state.wishlist.end()) {
      state.wishlist.push_back(sku);
    }
    see_other(res, "/shop/wishlist");
  });
  s.Get("/shop/wishlist", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, shop_wishlist());
  });

  // classifieds
  s.Get(R"(/classifieds/?)", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, classifieds_home());
  });
  s.Get("/classifieds/search", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, classifieds_search(req.get_param_value("q")));
  });
  s.Get(R"(/classifieds/item/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    const Listing* l = listing(std::stoi(req.matches[1].str()));
    html(res, l ? classifieds_item(*l) : not_found(classifieds), l ? 200 : 404);
  });
  s.Get(R"(/classifieds/item/(\d+)/edit)", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    const Listing* l = listing(std::stoi(req.matches[1].str()));
    html(res, l ? classifieds_edit(*l) : not_found(classifieds), l ? 200 : 404);
  });
  s.Post(R"(/classifieds/item/(\d+)/edit)", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    Listing* l = listing(std::stoi(req.matches[1].str()));
    if (!l) {
      html(res, not_found(classifieds), 404);
      return;
    }
    if (req.has_param("title")) l->title = trim(req.get_param_value("title"));
    if (req.has_param("price")) l->price = trim(req.get_param_value("price"));
    if (req.has_param("description")) l->description = req.get_param_value("description");
    see_other(res, "/classifieds/item/" + std::to_string(l->id));
  });
  s.Post("/classifieds/favorites/add", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    int id = std::atoi(req.get_param_value("id").c_str());
    if (listing(id) && std::find(state.favorites.begin(), state.favorites.end(), id) == state.favorites.end()) {
      state.favorites.push_back(id);
    }
    see_other(res, "/classifieds/favorites");
  });
  s.Get("/classifieds/favorites", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, classifieds_favorites());
  });

  // forum
  s.Get(R"(/forum/?)", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, forum_home());
  });
  s.Get("/forum/search", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, forum_search(req.get_param_value("q")));
  });
  s.Get(R"(/forum/post/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    const Post* p = post(std::stoi(req.matches[1].str()));
    html(res, p ? forum_post(*p) : not_found(forum), p ? 200 : 404);
  });
  s.Post(R"(/forum/post/(\d+)/comment)", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    Post* p = post(std::stoi(req.matches[1].str()));
    if (!p) {
      html(res, not_found(forum), 404);
      return;
    }
    std::string text = trim(req.get_param_value("text"));
    if (!text.empty()) p->comments.push_back({"agent_user", text});
    see_other(res, "/forum/post/" + std::to_string(p->id));
  });
  s.Get(R"(/forum/user/([A-Za-z0-9_\-]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, forum_user(req.matches[1].str()));
  });
  s.Get("/forum/users", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    html(res, forum_users());
  });

  s.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (res.status != 404 || !res.body.empty()) return;
    const SiteChrome& site = req.path.rfind("/classifieds", 0) == 0 ? classifieds
                             : req.path.rfind("/forum", 0) == 0     ? forum
                                                                    : shop;
    html(res, not_found(site), 404);
  });
}

SiteServer::SiteServer(const std::string& data_dir, int port) : impl_(std::make_unique<Impl>()) {
  impl_->data = json::parse(read_file((std::filesystem::path(data_dir) / "sites.json").string()));
  impl_->media_dir = (std::filesystem::path(data_dir) / "media").string();
  impl_->state = load_state(impl_->data);
  impl_->shop.name = impl_->data.at("shop").at("name");
  impl_->classifieds.name = impl_->data.at("classifieds").at("name");
  impl_->forum.name = impl_->data.at("forum").at("name");
  impl_->routes();
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  } else {
    impl_->port = impl_->server.bind_to_port("127.0.0.1", port) ? port : -1;
  }
  if (impl_->port <= 0) throw std::runtime_error("site server: cannot bind 127.0.0.1:" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

SiteServer::~SiteServer() { stop(); }

int SiteServer::port() const { return impl_->port; }

std::string SiteServer::base_url() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }

SiteUrls SiteServer::site_urls() const {
  SiteUrls u;
  u.base[Site::shopping] = base_url() + "/shop";
  u.base[Site::classifieds] = base_url() + "/classifieds";
  u.base[Site::reddit] = base_url() + "/forum";
  u.base[Site::multi] = base_url();
  return u;
}

void SiteServer::reset() {
  std::lock_guard lock(impl_->mu);
  impl_->state = load_state(impl_->data);
}

void SiteServer::stop() {
  if (!impl_->thread.joinable()) return;
  impl_->server.stop();
  impl_->thread.join();
}

}  // namespace webagent::fixtures
