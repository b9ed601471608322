package org.example.shop;

public interface Priced {
    double price();

    default double priceWithTax() {
        return price() * 1.2; //= price => double org.example.shop.Priced.price()
    }
}
