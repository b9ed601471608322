package org.example.shop;

import static com.google.common.base.Preconditions.checkNotNull;
import static java.lang.Math.max;
import static org.example.shop.Pricing.*;

import com.acme.external.Audit;
import java.util.ArrayList;
import java.util.List;
import java.util.Objects;

public class Item extends Entity {
    private double price;
    private List<String> tags = new ArrayList<>();
    private Pricing pricing;

    @Override
    public double weight() {
        return price / 2;
    }

    @Override
    protected void touch() {
        super.touch(); //= touch => void org.example.shop.Entity.touch()
    }

    public void format(String text) {
    }

    public void format(int count) {
    }

    public double total(int quantity) {
        checkNotNull(name); //= checkNotNull => java.lang.Object com.google.common.base.Preconditions.checkNotNull(java.lang.Object)
        touch(); //= touch => void org.example.shop.Item.touch()
        touch(5L); //= touch => void org.example.shop.Entity.touch(long)
        String label = getName(); //= getName => java.lang.String org.example.shop.Entity.getName()
        double floor = max(price, 1.0); //= max => double java.lang.Math.max(double, double)
        double rate = discount(quantity); //= discount => double org.example.shop.Pricing.discount(int)
        tags.add(label); //= add => boolean java.util.List.add(java.lang.Object)
        int count = tags.size(); //= size => int java.util.List.size()
        int width = label.length(); //= length => int java.lang.String.length()
        Audit.log(label); //= log => UNRESOLVED
        format(label); //= format => void org.example.shop.Item.format(java.lang.String)
        format(count); //= format => void org.example.shop.Item.format(int)
        format(lookup()); //= format => AMBIGUOUS void org.example.shop.Item.format(java.lang.String) | void org.example.shop.Item.format(int) || lookup => UNRESOLVED
        double applied = pricing.apply(this, quantity); //= apply => double org.example.shop.Pricing.apply(org.example.shop.Item, int)
        int magnitude = Math.abs(quantity); //= abs => int java.lang.Math.abs(int)
        String text = String.valueOf(floor); //= valueOf => java.lang.String java.lang.String.valueOf(double)
        double rounded = round(applied); //= round => double org.example.shop.Pricing.round(double)
        return floor + rate + count + width + magnitude + text.length() + rounded; //= length => int java.lang.String.length()
    }

    public String describe() {
        StringBuilder sb = new StringBuilder();
        sb.append(getName()); //= append => java.lang.StringBuilder java.lang.StringBuilder.append(java.lang.String) || getName => java.lang.String org.example.shop.Entity.getName()
        sb.append(price); //= append => java.lang.StringBuilder java.lang.StringBuilder.append(double)
        return sb.toString(); //= toString => java.lang.String java.lang.StringBuilder.toString()
    }

    public boolean sameAs(Item other) {
        return Objects.equals(getName(), other.getName()) && getId() == other.getId(); //= equals => boolean java.util.Objects.equals(java.lang.Object, java.lang.Object) || getName => java.lang.String org.example.shop.Entity.getName() || getName => java.lang.String org.example.shop.Entity.getName() || getId => long org.example.shop.Entity.getId() || getId => long org.example.shop.Entity.getId()
    }
}
